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
#include "tdopt/lyapmat.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "tdopt/errors.hpp"
#include "tdopt/parallel.hpp"

namespace tdopt {

namespace {

void require_stable(const FundamentalMatrix& fm) {
  const StabilityReport report = is_exponentially_stable(fm);
  if (report.verdict == Stability::kStable) return;
  std::ostringstream os;
  os << "closed loop is not exponentially stable (" << to_string(report.verdict)
     << "): decay fit beta=" << report.fit.beta << ", gamma=" << report.fit.gamma
     << ", ||K(T)||/||K(0)||=" << report.final_ratio;
  throw InstabilityError(os.str());
}

// U_ab = sum_ij M_ij Z(i + a n, j + b n), or with Z transposed for negative lags.
MatrixXd contract(const MatrixXd& Z, const MatrixXd& M, bool transposed) {
  const Eigen::Index n = M.rows();
  MatrixXd U(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      U(a, b) = transposed ? Z.block(b * n, a * n, n, n).transpose().cwiseProduct(M).sum()
                           : Z.block(a * n, b * n, n, n).cwiseProduct(M).sum();
    }
  }
  return U;
}

}  // namespace

// ------------------------------------------------------------ LyapunovBasis

LyapunovBasis::LyapunovBasis(const FundamentalMatrix& fm, int max_lag_steps)
    : dt_(fm.dt()),
      horizon_(fm.horizon()),
      n_(fm.n()),
      max_lag_(max_lag_steps),
      fit_(fm.decay()) {
  require_stable(fm);
  if (max_lag_steps < 0) throw InputError("lag span must be non-negative");
  const int J = fm.last_index();
  const Eigen::Index nn = n_ * n_;
  MatrixXd V(J + 1, nn);
  for (int j = 0; j <= J; ++j)
    V.row(j) = Eigen::Map<const Eigen::RowVectorXd>(fm.samples().sample(j).data(), nn);
  Z_.assign(max_lag_ + 1, MatrixXd::Zero(nn, nn));
  parallel_for(0, max_lag_ + 1, [&](int k) {
    const int L = J + 1 - k;
    if (L < 2) return;
    VectorXd w = VectorXd::Constant(L, dt_);
    w(0) *= 0.5;
    w(L - 1) *= 0.5;
    Z_[k].noalias() = (V.topRows(L).array().colwise() * w.array()).matrix().transpose() *
                      V.middleRows(k, L);
  });
}

MatrixXd LyapunovBasis::at_index(int k, const MatrixXd& M) const {
  if (M.rows() != n_ || M.cols() != n_) throw DimensionError("Lyapunov weight must be n x n");
  if (std::abs(k) > max_lag_) {
    std::ostringstream os;
    os << "lag " << k * dt_ << " outside the Lyapunov span " << max_lag_ * dt_;
    throw NumericalError(os.str());
  }
  return contract(Z_[std::abs(k)], M, k < 0);
}

MatrixXd LyapunovBasis::at(double tau, const MatrixXd& M) const {
  const double s = tau / dt_;
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9 * std::max(1.0, std::abs(s))) return at_index(static_cast<int>(r), M);
  const int k = static_cast<int>(std::floor(s));
  const double c = s - k;
  return (1.0 - c) * at_index(k, M) + c * at_index(k + 1, M);
}

double LyapunovBasis::tail_bound(double tau, double norm_M) const {
  if (!fit_.ok) return std::numeric_limits<double>::infinity();
  const double b = fit_.beta;
  return fit_.gamma * fit_.gamma * norm_M * std::exp(-b * (2.0 * horizon_ - std::abs(tau))) /
         (2.0 * b);
}

// ----------------------------------------------------------- LyapunovMatrix

LyapunovMatrix::LyapunovMatrix(std::shared_ptr<const LyapunovBasis> basis, MatrixXd M,
                               int span_steps)
    : basis_(std::move(basis)), M_(std::move(M)), span_(span_steps) {
  if (!basis_) throw InputError("missing Lyapunov basis");
  if (span_ > basis_->max_lag_steps()) throw NumericalError("span exceeds the basis lags");
  samples_.resize(2 * span_ + 1);
  parallel_for(-span_, span_ + 1, [&](int k) { samples_[k + span_] = basis_->at_index(k, M_); });
}

const MatrixXd& LyapunovMatrix::node(int k) const {
  if (std::abs(k) > span_) throw NumericalError("lag outside the stored Lyapunov span");
  return samples_[k + span_];
}

MatrixXd LyapunovMatrix::at(double tau) const {
  const double s = tau / dt();
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9 * std::max(1.0, std::abs(s))) return node(static_cast<int>(r));
  const int k = static_cast<int>(std::floor(s));
  const double c = s - k;
  return (1.0 - c) * node(k) + c * node(k + 1);
}

double LyapunovMatrix::tail_estimate() const {
  return basis_->tail_bound(span(), spectral_norm(M_));
}

void LyapunovMatrix::write_csv(std::ostream& os) const {
  const Eigen::Index n = M_.rows();
  os << "tau";
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) os << ",U" << (a + 1) << (b + 1);
  os << '\n' << std::setprecision(12);
  for (int k = -span_; k <= span_; ++k) {
    os << k * dt();
    const MatrixXd& U = node(k);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) os << ',' << U(a, b);
    os << '\n';
  }
}

LyapunovMatrix lyapunov_matrix(const FundamentalMatrix& fm, const MatrixXd& M) {
  const int span = 2 * fm.steps_per_delay();
  auto basis = std::make_shared<const LyapunovBasis>(fm, span);
  return LyapunovMatrix(std::move(basis), M, span);
}

MatrixXd lyapunov_matrix(const FundamentalMatrix& fm, const MatrixXd& M, double tau) {
  require_stable(fm);
  if (M.rows() != fm.n() || M.cols() != fm.n())
    throw DimensionError("Lyapunov weight must be n x n");
  if (tau < 0.0) return lyapunov_matrix(fm, M.transpose(), -tau).transpose();
  if (tau > fm.horizon()) throw NumericalError("lag beyond the fundamental-matrix horizon");
  const int J = fm.last_index();
  const auto at_lag = [&](int k) {
    MatrixXd U = MatrixXd::Zero(fm.n(), fm.n());
    const int L = J - k;
    for (int j = 0; j <= L; ++j) {
      const double w = (j == 0 || j == L) ? 0.5 : 1.0;
      U.noalias() += w * fm.samples().sample(j).transpose() * M * fm.samples().sample(j + k);
    }
    return MatrixXd(fm.dt() * U);
  };
  const double s = tau / fm.dt();
  const int k = static_cast<int>(std::floor(s + 1e-9));
  const double c = s - k;
  if (c < 1e-9 || k >= J) return at_lag(std::min(k, J));
  return (1.0 - c) * at_lag(k) + c * at_lag(k + 1);
}

// ---------------------------------------------------------------- Residuals

LyapunovResiduals lyap_property_residuals(const LyapunovMatrix& lm, const ClosedLoopSystem& cl,
                                          DistributedReading reading) {
  const int H = steps_per_delay(cl.h(), lm.dt());
  if (lm.span_steps() < H + 2) throw NumericalError("Lyapunov samples do not cover [-h, h]");
  if (lm.weight().rows() != cl.n()) throw DimensionError("weight does not match the system");
  const double dt = lm.dt();
  const std::vector<MatrixXd> G = resample(cl.G(), dt);
  LyapunovResiduals res;
  for (int k = -H; k <= H; ++k) res.scale = std::max(res.scale, spectral_norm(lm.node(k)));

  for (int k = 1; k < H; ++k) {
    const MatrixXd dU = (lm.node(k + 1) - lm.node(k - 1)) / (2.0 * dt);
    MatrixXd rhs = lm.node(k) * cl.A0() + lm.node(k - H) * cl.A1();
    if (cl.has_distributed()) {
      MatrixXd integral = MatrixXd::Zero(cl.n(), cl.n());
      const int last = reading == DistributedReading::kShifted ? H : H - k;
      for (int l = 0; l <= last; ++l) {
        const double w = (l == 0 || l == last) ? 0.5 : 1.0;
        const MatrixXd& g = reading == DistributedReading::kShifted ? G[l] : G[l + k];
        integral.noalias() += w * lm.node(k - H + l) * g;
      }
      rhs += dt * integral;
    }
    res.dyn_res = std::max(res.dyn_res, spectral_norm(dU - rhs));
  }

  const MatrixXd Mt = lm.weight().transpose();
  for (int k = 0; k <= lm.span_steps(); ++k) {
    const MatrixXd mirrored = lm.basis().at_index(k, Mt).transpose();
    res.sym_res = std::max(res.sym_res, spectral_norm(lm.node(-k) - mirrored));
  }

  const MatrixXd right = (-3.0 * lm.node(0) + 4.0 * lm.node(1) - lm.node(2)) / (2.0 * dt);
  const MatrixXd left = (3.0 * lm.node(0) - 4.0 * lm.node(-1) + lm.node(-2)) / (2.0 * dt);
  res.jump_res = spectral_norm(right - left + lm.weight());
  return res;
}

}  // namespace tdopt
