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
#include "tdopt/ddesim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

namespace {

constexpr double kNodeSnap = 1e-9;

// True, with the nearest integer, when x sits on a grid node.
bool snap_to_index(double x, long& index) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kNodeSnap * std::max(1.0, std::abs(x))) {
    index = static_cast<long>(r);
    return true;
  }
  return false;
}

double clamp_theta(double theta, double h) { return std::clamp(theta, -h, 0.0); }

}  // namespace

// --------------------------------------------------------------- Trajectory

Trajectory::Trajectory(double dt, int steps_per_delay, Eigen::Index rows, Eigen::Index cols)
    : dt_(dt),
      H_(steps_per_delay),
      rows_(rows),
      cols_(cols),
      stride_(rows * cols),
      last_(-steps_per_delay - 1),
      left0_(MatrixXd::Zero(rows, cols)) {
  if (!(dt > 0.0) || steps_per_delay < 1) throw GridError("invalid trajectory grid");
}

void Trajectory::append(const MatrixXd& value) {
  if (value.rows() != rows_ || value.cols() != cols_)
    throw DimensionError("trajectory sample has the wrong shape");
  buf_.insert(buf_.end(), value.data(), value.data() + stride_);
  ++last_;
  if (last_ == 0 && !has_left0_) left0_ = value;
}

void Trajectory::set_left_limit_at_zero(const MatrixXd& value) {
  if (value.rows() != rows_ || value.cols() != cols_)
    throw DimensionError("left limit has the wrong shape");
  left0_ = value;
  has_left0_ = true;
}

void Trajectory::check_index(int j) const {
  if (j < -H_ || j > last_) {
    std::ostringstream os;
    os << "time index " << j << " outside the stored range [" << -H_ << ", " << last_ << "]";
    throw NumericalError(os.str());
  }
}

Eigen::Map<const MatrixXd> Trajectory::sample(int j) const {
  check_index(j);
  return Eigen::Map<const MatrixXd>(column(j), rows_, cols_);
}

Eigen::Map<const MatrixXd> Trajectory::sample(int j, Side side) const {
  if (j == 0 && side == Side::kLeft) {
    return Eigen::Map<const MatrixXd>(left0_.data(), rows_, cols_);
  }
  return sample(j);
}

MatrixXd Trajectory::value(double t, Side side) const {
  const double s = t / dt_;
  long node = 0;
  if (snap_to_index(s, node)) return sample(static_cast<int>(node), side);
  const int k = static_cast<int>(std::floor(s));
  const double c = s - k;
  return (1.0 - c) * sample(k, Side::kRight) + c * sample(k + 1, Side::kLeft);
}

double Trajectory::window_sup_norm(int j) const {
  double best = 0.0;
  for (int k = std::max(-H_, j - H_); k <= j; ++k) best = std::max(best, spectral_norm(sample(k)));
  return best;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t";
  for (Eigen::Index i = 0; i < stride_; ++i) os << ",x" << (i + 1);
  os << '\n' << std::setprecision(12);
  for (int j = 0; j <= last_; ++j) {
    os << j * dt_;
    const double* col = column(j);
    for (Eigen::Index i = 0; i < stride_; ++i) os << ',' << col[i];
    os << '\n';
  }
}

// ---------------------------------------------------------- DelayIntegrator

std::vector<MatrixXd> resample(const MatrixFunction& f, double dt) {
  const double h = f.grid().h();
  const int H = steps_per_delay(h, dt);
  std::vector<MatrixXd> out;
  out.reserve(H + 1);
  for (int i = 0; i <= H; ++i) out.push_back(f.at(clamp_theta(-h + i * (h / H), h)));
  return out;
}

DelayIntegrator::DelayIntegrator(const ClosedLoopSystem& cl, double dt)
    : A0_(cl.A0()),
      A1_(cl.A1()),
      dt_(dt),
      H_(tdopt::steps_per_delay(cl.h(), dt)),
      has_delay_(!cl.A1().isZero(0.0)),
      has_distributed_(cl.has_distributed()) {
  if (has_distributed_) {
    g_int_ = resample(cl.G(), dt);
    const double h = cl.h();
    g_half_.reserve(H_);
    for (int i = 0; i < H_; ++i)
      g_half_.push_back(cl.G().at(clamp_theta(-h + (i + 0.5) * (h / H_), h)));
  }
}

// G at theta = -h + (m - c) dt for the stage offset c in {0, 1/2, 1}.
const MatrixXd& DelayIntegrator::g_stage(int stage, int m) const {
  switch (stage) {
    case 0: return g_int_[m];
    case 1: return g_half_[m - 1];
    default: return g_int_[m - 1];
  }
}

MatrixXd DelayIntegrator::rhs(const Trajectory& tr, int j, int stage, const MatrixXd& Y) const {
  static constexpr double kOffset[3] = {0.0, 0.5, 1.0};
  const double c = kOffset[stage];
  MatrixXd out = A0_ * Y;
  if (!has_delay_ && !has_distributed_) return out;

  // x(t + c dt - h) lies in the segment [t_{j-H}, t_{j-H+1}].
  MatrixXd delayed;
  if (stage == 0) {
    delayed = tr.sample(j - H_, Side::kRight);
  } else if (stage == 2) {
    delayed = tr.sample(j - H_ + 1, Side::kLeft);
  } else {
    delayed = 0.5 * (tr.sample(j - H_, Side::kRight) + tr.sample(j - H_ + 1, Side::kLeft));
  }
  if (has_delay_) out.noalias() += A1_ * delayed;
  if (!has_distributed_) return out;

  const double half = 0.5 * dt_;
  MatrixXd acc = MatrixXd::Zero(out.rows(), out.cols());
  if (stage == 0) {
    for (int k = j - H_; k < j; ++k) {
      const int m = k - j + H_;
      acc.noalias() += g_int_[m] * tr.sample(k, Side::kRight);
      acc.noalias() += g_int_[m + 1] * tr.sample(k + 1, Side::kLeft);
    }
    acc *= half;
  } else {
    if (stage == 1) {
      // Partial first piece [t - h, t_{j-H+1}] of length dt/2.
      acc.noalias() += 0.5 * g_int_[0] * delayed;
      acc.noalias() += 0.5 * g_stage(stage, 1) * tr.sample(j - H_ + 1, Side::kLeft);
    }
    for (int k = j - H_ + 1; k < j; ++k) {
      const int m = k - j + H_;
      acc.noalias() += g_stage(stage, m) * tr.sample(k, Side::kRight);
      acc.noalias() += g_stage(stage, m + 1) * tr.sample(k + 1, Side::kLeft);
    }
    // Final piece [t_j, t] of length c dt ends at the stage value.
    acc.noalias() += c * g_stage(stage, H_) * tr.sample(j, Side::kRight);
    acc.noalias() += c * g_int_[H_] * Y;
    acc *= half;
  }
  out += acc;
  return out;
}

void DelayIntegrator::advance(Trajectory& traj, int steps) const {
  if (traj.steps_per_delay() != H_ || std::abs(traj.dt() - dt_) > 1e-12 * dt_)
    throw GridError("trajectory grid does not match the integrator");
  if (traj.last_index() < 0) throw NumericalError("trajectory history is incomplete");
  for (int s = 0; s < steps; ++s) {
    const int j = traj.last_index();
    const MatrixXd X = traj.sample(j, Side::kRight);
    const MatrixXd k1 = rhs(traj, j, 0, X);
    const MatrixXd k2 = rhs(traj, j, 1, X + (0.5 * dt_) * k1);
    const MatrixXd k3 = rhs(traj, j, 1, X + (0.5 * dt_) * k2);
    const MatrixXd k4 = rhs(traj, j, 2, X + dt_ * k3);
    const MatrixXd next = X + (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
      std::ostringstream os;
      os << "solution diverged: non-finite state at t=" << (j + 1) * dt_;
      throw DivergenceError((j + 1) * dt_, os.str());
    }
    traj.append(next);
  }
}

Trajectory integrate_closed_loop(const ClosedLoopSystem& cl, const History& phi,
                                 double horizon, double dt) {
  if (phi.dim() != cl.n()) throw DimensionError("history dimension does not match the system");
  if (std::abs(phi.grid().h() - cl.h()) > 1e-12 * cl.h())
    throw GridError("history grid does not span the system delay");
  if (!(horizon >= 0.0)) throw InputError("horizon must be non-negative");
  DelayIntegrator integrator(cl, dt);
  const int H = integrator.steps_per_delay();
  Trajectory traj(dt, H, cl.n(), 1);
  const double h = cl.h();
  for (int i = 0; i <= H; ++i) traj.append(phi.at(clamp_theta(-h + i * (h / H), h)));
  traj.set_left_limit_at_zero(phi.at_zero());
  integrator.advance(traj, static_cast<int>(std::ceil(horizon / dt - kNodeSnap)));
  return traj;
}

// -------------------------------------------------------- FundamentalMatrix

DecayFit fit_decay(const std::vector<double>& norms, double dt) {
  DecayFit fit;
  const int J = static_cast<int>(norms.size()) - 1;
  if (J < 4) return fit;
  std::vector<double> env(norms.size());
  double running = 0.0;
  for (int j = J; j >= 0; --j) env[j] = running = std::max(running, norms[j]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int j = J / 2; j <= J; ++j) {
    if (!(env[j] > 0.0)) continue;
    const double t = j * dt, y = std::log(env[j]);
    sx += t, sy += y, sxx += t * t, sxy += t * y;
    ++count;
  }
  double peak = 0.0;
  for (double v : norms) peak = std::max(peak, v);
  fit.gamma = peak;
  if (count < 2) {
    // The envelope vanished: treat as decay faster than anything measurable.
    fit.beta = count == 0 && peak > 0.0 ? std::log(1e300) / (J * dt) : 0.0;
    fit.ok = fit.beta > 0.0;
    return fit;
  }
  const double denom = count * sxx - sx * sx;
  if (!(denom > 0.0)) return fit;
  fit.beta = -(count * sxy - sx * sy) / denom;
  if (fit.beta > 0.0) {
    double g = 0.0;
    for (int j = 0; j <= J; ++j) g = std::max(g, norms[j] * std::exp(fit.beta * j * dt));
    fit.gamma = g;
    fit.ok = true;
  }
  return fit;
}

FundamentalMatrix::FundamentalMatrix(Trajectory samples) : traj_(std::move(samples)) {
  norms_.reserve(traj_.last_index() + 1);
  for (int j = 0; j <= traj_.last_index(); ++j) norms_.push_back(spectral_norm(traj_.sample(j)));
  fit_ = fit_decay(norms_, traj_.dt());
}

MatrixXd FundamentalMatrix::at_index(int j, Side side) const {
  if (j < 0 || (j == 0 && side == Side::kLeft)) return MatrixXd::Zero(n(), n());
  if (j > traj_.last_index()) {
    std::ostringstream os;
    os << "t=" << j * dt() << " beyond the fundamental-matrix horizon " << horizon();
    throw NumericalError(os.str());
  }
  return traj_.sample(j);
}

MatrixXd FundamentalMatrix::at(double t, Side side) const {
  if (t > horizon() * (1.0 + kNodeSnap) + kNodeSnap) {
    std::ostringstream os;
    os << "t=" << t << " beyond the fundamental-matrix horizon " << horizon();
    throw NumericalError(os.str());
  }
  const double s = t / dt();
  long node = 0;
  if (snap_to_index(s, node)) return at_index(static_cast<int>(node), side);
  if (t < 0.0) return MatrixXd::Zero(n(), n());
  const int k = static_cast<int>(std::floor(s));
  const double c = s - k;
  return (1.0 - c) * at_index(k, Side::kRight) + c * at_index(k + 1, Side::kLeft);
}

double FundamentalMatrix::norm_at_index(int j) const {
  if (j < 0) return 0.0;
  return norms_.at(j);
}

FundamentalMatrix fundamental_matrix(const ClosedLoopSystem& cl,
                                     const FundamentalMatrixOptions& options) {
  const double h = cl.h();
  const double dt = options.dt > 0.0 ? options.dt : h / 128.0;
  DelayIntegrator integrator(cl, dt);
  const int H = integrator.steps_per_delay();
  const Eigen::Index n = cl.n();
  Trajectory traj(dt, H, n, n);
  for (int j = -H; j < 0; ++j) traj.append(MatrixXd::Zero(n, n));
  traj.set_left_limit_at_zero(MatrixXd::Zero(n, n));
  traj.append(MatrixXd::Identity(n, n));

  if (options.horizon > 0.0) {
    integrator.advance(traj, static_cast<int>(std::ceil(options.horizon / dt - kNodeSnap)));
    return FundamentalMatrix(std::move(traj));
  }

  const double cap = options.max_horizon > 0.0 ? options.max_horizon : 200.0 * h;
  const int cap_steps = static_cast<int>(std::ceil(cap / dt - kNodeSnap));
  const int block = std::max(1, static_cast<int>(std::lround(options.block * h / dt)));
  double peak = 1.0;
  while (traj.last_index() < cap_steps) {
    const int start = traj.last_index() + 1;
    integrator.advance(traj, std::min(block, cap_steps - traj.last_index()));
    double block_max = 0.0;
    for (int j = start; j <= traj.last_index(); ++j)
      block_max = std::max(block_max, spectral_norm(traj.sample(j)));
    peak = std::max(peak, block_max);
    if (block_max < options.decay_ratio * peak) break;
    if (block_max > 1e12) break;  // clearly growing; no point integrating further
  }
  return FundamentalMatrix(std::move(traj));
}

FundamentalMatrix fundamental_matrix(const ClosedLoopSystem& cl, double horizon, double dt) {
  FundamentalMatrixOptions options;
  options.horizon = horizon;
  options.dt = dt;
  return fundamental_matrix(cl, options);
}

// ------------------------------------------------------------ Cauchy kernel

KernelNodes::KernelNodes(const FundamentalMatrix& fm, const ClosedLoopSystem& cl)
    : fm_(fm), A1_(cl.A1()), H_(fm.steps_per_delay()) {
  if (std::abs(fm.delay() - cl.h()) > 1e-12 * cl.h())
    throw GridError("fundamental matrix was built for a different delay");
  g_ = resample(cl.G(), fm.dt());
}

MatrixXd KernelNodes::khat(int j, int i, Side side) const {
  if (i < 0 || i > H_) throw NumericalError("theta index outside [-h, 0]");
  if (j > fm_.last_index()) throw NumericalError("t beyond the fundamental-matrix horizon");
  const Eigen::Index n = fm_.n();
  MatrixXd out = fm_.at_index(j - i, side) * A1_;
  const Trajectory& K = fm_.samples();
  MatrixXd acc = MatrixXd::Zero(n, n);
  // Inner trapezoid over xi = -h + l dt, K argument index j - i + l.
  for (int l = std::max(0, i - j); l < i; ++l) {
    const int m = j - i + l;
    if (m >= 0) acc.noalias() += K.sample(m, Side::kRight) * g_[l];
    if (m + 1 > 0) acc.noalias() += K.sample(m + 1) * g_[l + 1];
  }
  out += (0.5 * fm_.dt()) * acc;
  return out;
}

MatrixXd khat_kernel(const FundamentalMatrix& fm, const ClosedLoopSystem& cl, double t,
                     double theta, Side side) {
  const double h = cl.h();
  if (t < -kNodeSnap || t > fm.horizon() * (1.0 + kNodeSnap))
    throw NumericalError("t outside the fundamental-matrix horizon");
  if (theta < -h * (1.0 + kNodeSnap) || theta > kNodeSnap * h)
    throw NumericalError("theta outside [-h, 0]");
  const double dt = fm.dt();
  long j = 0, i = 0;
  if (snap_to_index(t / dt, j) && snap_to_index((theta + h) / dt, i)) {
    return KernelNodes(fm, cl).khat(static_cast<int>(j), static_cast<int>(i), side);
  }
  // Off-grid: split the inner integral where K or G has a kink.
  theta = clamp_theta(theta, h);
  const double shift = t - theta;
  MatrixXd out = fm.at(shift - h, side) * cl.A1();
  std::vector<double> cuts{-h, theta};
  for (long k = static_cast<long>(std::ceil((shift - h) / dt)); k * dt - shift < theta; ++k) {
    const double xi = k * dt - shift;
    if (xi > -h) cuts.push_back(xi);
  }
  const ThetaGrid& grid = cl.grid();
  for (int q = 1; q < grid.intervals(); ++q)
    if (grid.node(q) < theta) cuts.push_back(grid.node(q));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return std::abs(a - b) < 1e-12 * h; }),
             cuts.end());
  for (size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    out += 0.5 * (b - a) *
           (fm.at(shift + a, Side::kRight) * cl.G().at(a) +
            fm.at(shift + b, Side::kLeft) * cl.G().at(b));
  }
  return out;
}

namespace {

VectorXd cauchy_at_node(const KernelNodes& nodes, const std::vector<VectorXd>& phi, int j) {
  const int H = nodes.steps_per_delay();
  VectorXd x = nodes.K(j) * phi[H];
  VectorXd acc = VectorXd::Zero(x.size());
  // Piece [theta_i, theta_{i+1}]: the K argument (j - i) dt is approached from
  // below at the lower end and from above at the upper end.
  for (int i = 0; i < H; ++i) {
    acc += nodes.khat(j, i, Side::kLeft) * phi[i];
    acc += nodes.khat(j, i + 1, Side::kRight) * phi[i + 1];
  }
  return x + (0.5 * nodes.dt()) * acc;
}

}  // namespace

VectorXd cauchy_solution(const FundamentalMatrix& fm, const ClosedLoopSystem& cl,
                         const History& phi, double t) {
  if (phi.dim() != cl.n()) throw DimensionError("history dimension does not match the system");
  if (t < -kNodeSnap || t > fm.horizon() * (1.0 + kNodeSnap))
    throw NumericalError("t outside the fundamental-matrix horizon");
  KernelNodes nodes(fm, cl);
  const int H = nodes.steps_per_delay();
  const double h = cl.h();
  std::vector<VectorXd> samples;
  samples.reserve(H + 1);
  for (int i = 0; i <= H; ++i) samples.push_back(phi.at(clamp_theta(-h + i * (h / H), h)));
  const double s = std::max(0.0, t) / fm.dt();
  long node = 0;
  if (snap_to_index(s, node)) return cauchy_at_node(nodes, samples, static_cast<int>(node));
  const int k = static_cast<int>(std::floor(s));
  const double c = s - k;
  return (1.0 - c) * cauchy_at_node(nodes, samples, k) +
         c * cauchy_at_node(nodes, samples, k + 1);
}

// --------------------------------------------------------------- Stability

StabilityReport is_exponentially_stable(const FundamentalMatrix& fm) {
  StabilityReport report;
  report.fit = fm.decay();
  const double k0 = fm.norm_at_index(0);
  report.final_ratio = fm.norm_at_index(fm.last_index()) / k0;
  if (report.fit.beta > 0.0 && report.final_ratio < 1e-3) {
    report.verdict = Stability::kStable;
  } else if (report.final_ratio > 1e3) {
    report.verdict = Stability::kUnstable;
  } else {
    report.verdict = Stability::kInconclusive;
  }
  return report;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    default: return "inconclusive";
  }
}

}  // namespace tdopt
