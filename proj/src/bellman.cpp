/*
 Copyright 2026 The tdopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "tdopt/bellman.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "tdopt/errors.hpp"
#include "tdopt/parallel.hpp"

namespace tdopt {

namespace {

// Trapezoid weight of node l among 0..last on a step dt.
double trap(int l, int last, double dt) { return (l == 0 || l == last) ? 0.5 * dt : dt; }

void write_entries(std::ostream& os, const MatrixXd& m) {
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) os << ',' << m(a, b);
}

void write_header(std::ostream& os, Eigen::Index n) {
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) os << ",P" << (a + 1) << (b + 1);
  os << '\n';
}

}  // namespace

// ------------------------------------------------------------ WeightKernels

WeightKernels weight_kernels(const CostWeights& w, const ControlLaw& law) {
  const MatrixXd& G0 = law.gamma0();
  const MatrixFunction& G1 = law.gamma1();
  if (G0.rows() != w.R().rows() || G0.cols() != w.Q().rows())
    throw DimensionError("control law does not match the cost weights");
  const ThetaGrid& grid = G1.grid();
  const MatrixXd G0tR = G0.transpose() * w.R();
  std::vector<MatrixXd> m2;
  m2.reserve(grid.size());
  for (int i = 0; i < grid.size(); ++i) m2.push_back(G0tR * G1.node(i));
  std::vector<MatrixXd> m3;
  m3.reserve(static_cast<size_t>(grid.size()) * grid.size());
  for (int a = 0; a < grid.size(); ++a) {
    const MatrixXd left = G1.node(a).transpose() * w.R();
    for (int b = 0; b < grid.size(); ++b) m3.push_back(left * G1.node(b));
  }
  return WeightKernels{w.Q() + G0tR * G0, MatrixFunction(grid, std::move(m2)), std::move(m3)};
}

// ----------------------------------------------------------- BellmanKernels

BellmanKernels::BellmanKernels(MatrixXd pi0, MatrixFunction pi1, std::vector<MatrixXd> pi2)
    : pi0_(std::move(pi0)), pi1_(std::move(pi1)), pi2_(std::move(pi2)) {
  const size_t m = static_cast<size_t>(pi1_.grid().size());
  if (pi2_.size() != m * m) throw DimensionError("Pi2 does not cover the grid");
}

const MatrixXd& BellmanKernels::pi2(int xi, int theta) const {
  return pi2_.at(static_cast<size_t>(xi) * grid().size() + theta);
}

double BellmanKernels::pi2_asymmetry() const {
  double worst = 0.0;
  for (int a = 0; a < grid().size(); ++a)
    for (int b = a; b < grid().size(); ++b)
      worst = std::max(worst, spectral_norm(pi2(a, b).transpose() - pi2(b, a)));
  return worst;
}

void BellmanKernels::write_pi1_csv(std::ostream& os) const {
  os << "theta";
  write_header(os, n());
  os << std::setprecision(12);
  for (int i = 0; i < grid().size(); ++i) {
    os << grid().node(i);
    write_entries(os, pi1_.node(i));
    os << '\n';
  }
}

void BellmanKernels::write_pi2_csv(std::ostream& os) const {
  os << "xi,theta";
  write_header(os, n());
  os << std::setprecision(12);
  for (int a = 0; a < grid().size(); ++a) {
    for (int b = 0; b < grid().size(); ++b) {
      os << grid().node(a) << ',' << grid().node(b);
      write_entries(os, pi2(a, b));
      os << '\n';
    }
  }
}

// --------------------------------------------------------- BellmanAssembly

BellmanAssembly::BellmanAssembly(std::shared_ptr<const LyapunovBasis> basis,
                                 const FundamentalMatrix& fm, const ClosedLoopSystem& cl,
                                 const CostWeights& w, const ControlLaw& law)
    : grid_(law.gamma1().grid()), A1_(cl.A1()) {
  if (!basis) throw InputError("missing Lyapunov basis");
  if (!(grid_ == cl.grid())) throw GridError("control law and closed loop use different grids");
  const double dt = fm.dt();
  spc_ = steps_per_theta_cell(grid_, dt);
  H_ = steps_per_delay(cl.h(), dt);
  N_ = grid_.intervals();
  if (basis->max_lag_steps() < 2 * H_) throw NumericalError("Lyapunov basis must span 2h");
  const Eigen::Index n = cl.n();
  const MatrixXd& R = w.R();
  const MatrixXd& G0 = law.gamma0();
  KernelNodes nodes(fm, cl);
  G_fine_ = nodes.fine_G();
  const std::vector<MatrixXd> g1 = resample(law.gamma1(), dt);
  std::vector<MatrixXd> Rg1;
  Rg1.reserve(H_ + 1);
  for (const auto& g : g1) Rg1.push_back(R * g);

  // Weights of U(c + o dt, W_o), o = -H..H.
  std::vector<MatrixXd> W(2 * H_ + 1, MatrixXd::Zero(n, n));
  const auto Wo = [&](int o) -> MatrixXd& { return W[o + H_]; };
  Wo(0) += w.Q() + G0.transpose() * R * G0;
  const MatrixXd G0tR = G0.transpose() * R;
  for (int p = 0; p <= H_; ++p) {
    const MatrixXd m2 = trap(p, H_, dt) * (G0tR * g1[p]);
    Wo(p - H_) += m2;
    Wo(H_ - p) += m2.transpose();
  }
  parallel_for(-H_, H_ + 1, [&](int d) {
    MatrixXd acc = MatrixXd::Zero(n, n);
    for (int p = std::max(0, -d); p <= std::min(H_, H_ - d); ++p)
      acc.noalias() += (trap(p, H_, dt) * trap(p + d, H_, dt)) * (g1[p].transpose() * Rg1[p + d]);
    Wo(d) += acc;
  });

  F_.assign(H_ + 1, MatrixXd::Zero(n, n));
  parallel_for(0, H_ + 1, [&](int c) {
    MatrixXd acc = MatrixXd::Zero(n, n);
    for (int o = -H_; o <= H_; ++o) {
      if (W[o + H_].isZero(0.0)) continue;
      acc += basis->at_index(c + o, W[o + H_]);
    }
    F_[c] = acc;
  });

  // P(a, theta) = int_{-h}^{theta} F(a - theta + d) G(d) dd on fine d nodes.
  P_.assign(static_cast<size_t>(H_ + 1) * (N_ + 1), MatrixXd::Zero(n, n));
  if (cl.has_distributed()) {
    parallel_for(0, H_ + 1, [&](int a) {
      for (int i = 0; i <= N_; ++i) {
        const int ti = i * spc_;
        MatrixXd acc = MatrixXd::Zero(n, n);
        for (int l = 0; l <= ti && ti > 0; ++l)
          acc.noalias() += trap(l, ti, dt) * (aggregate(a - ti + l) * G_fine_[l]);
        P_[static_cast<size_t>(a) * (N_ + 1) + i] = acc;
      }
    });
  }

  // Control coefficient of phi(0): L0(t) = G0 K(t) + int G1(s) K(t+s) ds, t in [0, h].
  std::vector<MatrixXd> L0(H_ + 1);
  parallel_for(0, H_ + 1, [&](int j) {
    MatrixXd acc = MatrixXd::Zero(law.gamma0().rows(), n);
    for (int l = 0; l < H_; ++l) {
      acc.noalias() += g1[l] * nodes.K(j - H_ + l, Side::kRight);
      acc.noalias() += g1[l + 1] * nodes.K(j - H_ + l + 1, Side::kLeft);
    }
    L0[j] = G0 * nodes.K(j) + (0.5 * dt) * acc;
  });

  // dPi1(theta) = int_0^{theta+h} L0^T(t) R G1(theta - t) dt.
  dpi1_.assign(N_ + 1, MatrixXd::Zero(n, n));
  for (int i = 0; i <= N_; ++i) {
    const int ti = i * spc_;
    for (int m = 0; m <= ti && ti > 0; ++m)
      dpi1_[i].noalias() += trap(m, ti, dt) * (L0[m].transpose() * Rg1[ti - m]);
  }

  // Khat(t_j, xi_i) one-sided tables for j = 0..H; they differ only at j = xi + h.
  const auto idx = [&](int j, int i) { return static_cast<size_t>(j) * (N_ + 1) + i; };
  std::vector<MatrixXd> kr(static_cast<size_t>(H_ + 1) * (N_ + 1));
  std::vector<MatrixXd> kl(kr.size());
  parallel_for(0, H_ + 1, [&](int j) {
    for (int i = 0; i <= N_; ++i) {
      kr[idx(j, i)] = nodes.khat(j, i * spc_, Side::kRight);
      kl[idx(j, i)] = j == i * spc_ ? nodes.khat(j, i * spc_, Side::kLeft) : kr[idx(j, i)];
    }
  });
  const auto khat = [&](int j, int i, Side side) -> MatrixXd {
    if (j < 0 || (j == 0 && side == Side::kLeft)) return MatrixXd::Zero(n, n);
    return side == Side::kRight ? kr[idx(j, i)] : kl[idx(j, i)];
  };

  // L1p(t, xi) = G0 Khat(t, xi) + int G1(s) Khat(t+s, xi) ds, both one-sided limits.
  std::vector<MatrixXd> l1r(kr.size()), l1l(kr.size());
  parallel_for(0, H_ + 1, [&](int j) {
    for (int i = 0; i <= N_; ++i) {
      MatrixXd acc = MatrixXd::Zero(law.gamma0().rows(), n);
      for (int l = 0; l < H_; ++l) {
        acc.noalias() += g1[l] * khat(j - H_ + l, i, Side::kRight);
        acc.noalias() += g1[l + 1] * khat(j - H_ + l + 1, i, Side::kLeft);
      }
      acc *= 0.5 * dt;
      l1r[idx(j, i)] = G0 * khat(j, i, Side::kRight) + acc;
      l1l[idx(j, i)] = G0 * khat(j, i, Side::kLeft) + acc;
    }
  });

  // C(xi, theta) = int_0^{theta+h} L1p^T(t, xi) R G1(theta - t) dt and the
  // initial-segment self term int_0^{min+h} G1^T(xi - t) R G1(theta - t) dt.
  C_.assign(static_cast<size_t>(N_ + 1) * (N_ + 1), MatrixXd::Zero(n, n));
  E3_.assign(C_.size(), MatrixXd::Zero(n, n));
  parallel_for(0, N_ + 1, [&](int a) {
    const int ta = a * spc_;
    for (int b = 0; b <= N_; ++b) {
      const int tb = b * spc_;
      MatrixXd acc = MatrixXd::Zero(n, n);
      for (int m = 0; m < tb; ++m) {
        acc.noalias() += l1r[idx(m, a)].transpose() * Rg1[tb - m];
        acc.noalias() += l1l[idx(m + 1, a)].transpose() * Rg1[tb - m - 1];
      }
      C_[idx(a, b)] = (0.5 * dt) * acc;
      const int top = std::min(ta, tb);
      MatrixXd self = MatrixXd::Zero(n, n);
      for (int m = 0; m <= top && top > 0; ++m)
        self.noalias() += trap(m, top, dt) * (g1[ta - m].transpose() * Rg1[tb - m]);
      E3_[idx(a, b)] = self;
    }
  });
}

MatrixXd BellmanAssembly::aggregate(int k) const {
  if (std::abs(k) > H_) throw NumericalError("aggregate lag outside [-h, h]");
  return k >= 0 ? F_[k] : MatrixXd(F_[-k].transpose());
}

MatrixXd BellmanAssembly::pi0() const { return F_[0]; }

MatrixFunction BellmanAssembly::pi1() const {
  std::vector<MatrixXd> out(N_ + 1);
  for (int i = 0; i <= N_; ++i) out[i] = aggregate(-i * spc_) * A1_ + P(0, i) + dpi1_[i];
  return MatrixFunction(grid_, std::move(out));
}

std::vector<MatrixXd> BellmanAssembly::pi2() const {
  const double dt = grid_.h() / H_;
  std::vector<MatrixXd> out(static_cast<size_t>(N_ + 1) * (N_ + 1));
  const auto idx = [&](int a, int b) { return static_cast<size_t>(a) * (N_ + 1) + b; };
  parallel_for(0, N_ + 1, [&](int a) {
    const int ta = a * spc_;
    for (int b = 0; b <= N_; ++b) {
      const int tb = b * spc_;
      MatrixXd v = A1_.transpose() * aggregate(ta - tb) * A1_ + A1_.transpose() * P(ta, b) +
                   P(tb, a).transpose() * A1_;
      for (int l = 0; l <= ta && ta > 0; ++l)
        v.noalias() += trap(l, ta, dt) * (G_fine_[l].transpose() * P(ta - l, b));
      v += C_[idx(a, b)] + C_[idx(b, a)].transpose() + E3_[idx(a, b)];
      out[idx(a, b)] = v;
    }
  });
  return out;
}

BellmanKernels BellmanAssembly::kernels() const { return BellmanKernels(pi0(), pi1(), pi2()); }

BellmanKernels bellman_kernels(const SystemModel& sys, const CostWeights& w,
                               const ControlLaw& law, const KernelBuildOptions& options) {
  const ClosedLoopSystem cl = close_loop(sys, law);
  FundamentalMatrixOptions fo;
  fo.dt = options.dt;
  fo.max_horizon = options.max_horizon;
  const FundamentalMatrix fm = fundamental_matrix(cl, fo);
  auto basis = std::make_shared<const LyapunovBasis>(fm, 2 * fm.steps_per_delay());
  return BellmanAssembly(basis, fm, cl, w, law).kernels();
}

// ------------------------------------------------------------- Evaluation

double evaluate_functional(const BellmanKernels& k, const History& phi) {
  if (!(phi.grid() == k.grid())) throw GridError("history grid does not match the kernels");
  if (phi.dim() != k.n()) throw DimensionError("history dimension does not match the kernels");
  const std::vector<double> w = k.grid().trapezoid_weights();
  const int m = k.grid().size();
  const VectorXd& x0 = phi.at_zero();
  VectorXd lin = VectorXd::Zero(k.n());
  for (int i = 0; i < m; ++i) lin += w[i] * (k.pi1().node(i) * phi.node(i));
  double quad = 0.0;
  for (int a = 0; a < m; ++a) {
    VectorXd row = VectorXd::Zero(k.n());
    for (int b = 0; b < m; ++b) row += w[b] * (k.pi2(a, b) * phi.node(b));
    quad += w[a] * phi.node(a).dot(row);
  }
  return x0.dot(k.pi0() * x0) + 2.0 * x0.dot(lin) + quad;
}

SimulatedCost simulate_cost(const ClosedLoopSystem& cl, const ControlLaw& law,
                            const CostWeights& w, const History& phi, double horizon,
                            double dt) {
  if (std::abs(law.gamma1().grid().h() - cl.h()) > 1e-12 * cl.h())
    throw GridError("control law grid does not span the system delay");
  const Trajectory x = integrate_closed_loop(cl, phi, horizon, dt);
  const int H = x.steps_per_delay();
  const int J = x.last_index();
  const std::vector<MatrixXd> g1 = resample(law.gamma1(), dt);
  std::vector<double> rate(J + 1);
  parallel_for(0, J + 1, [&](int j) {
    VectorXd u = law.gamma0() * x.sample(j);
    VectorXd acc = VectorXd::Zero(u.size());
    for (int l = 0; l <= H; ++l) acc += trap(l, H, dt) * (g1[l] * x.sample(j - H + l));
    u += acc;
    const VectorXd xj = x.sample(j);
    rate[j] = xj.dot(w.Q() * xj) + u.dot(w.R() * u);
  });
  SimulatedCost out;
  for (int j = 0; j <= J; ++j) out.value += trap(j, J, dt) * rate[j];

  // Tail: the rate decays like ||x||^2, so extrapolate with twice the fitted state decay.
  std::vector<double> norms(J + 1);
  for (int j = 0; j <= J; ++j) norms[j] = x.sample(j).norm();
  const DecayFit fit = fit_decay(norms, dt);
  double last_window = 0.0;
  for (int j = std::max(0, J - H); j <= J; ++j) last_window = std::max(last_window, rate[j]);
  out.tail_estimate = last_window == 0.0 ? 0.0
                      : fit.ok       ? last_window / (2.0 * fit.beta)
                                     : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace tdopt
