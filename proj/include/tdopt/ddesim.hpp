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
#ifndef TDOPT_DDESIM_HPP
#define TDOPT_DDESIM_HPP

#include <iosfwd>
#include <vector>

#include "tdopt/grid.hpp"
#include "tdopt/sysmodel.hpp"

namespace tdopt {

/**
 * Matrix-valued solution sampled on t_j = j*dt, j = -H..J, H = h/dt.
 *
 * Ordinary trajectories are n x 1; the fundamental matrix is stored as an
 * n x n trajectory. The value at t = 0 may jump (K(0-) = 0, K(0) = I), so
 * the left limit at zero is kept separately; every other node is continuous.
 */
class Trajectory {
 public:
  Trajectory(double dt, int steps_per_delay, Eigen::Index rows, Eigen::Index cols);

  double dt() const { return dt_; }
  int steps_per_delay() const { return H_; }
  double delay() const { return H_ * dt_; }
  int last_index() const { return last_; }
  double horizon() const { return last_ * dt_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  /// Node value; j in [-H, J]. At j == 0 this is the right value.
  Eigen::Map<const MatrixXd> sample(int j) const;
  /// One-sided node value (only j == 0 can differ).
  Eigen::Map<const MatrixXd> sample(int j, Side side) const;

  /// Piecewise-linear value for t in [-h, T].
  MatrixXd value(double t, Side side = Side::kRight) const;
  /// Vector trajectories only.
  VectorXd state(double t) const { return value(t); }

  /// Largest sample norm over the window [t_j - h, t_j].
  double window_sup_norm(int j) const;

  /// `t,x1..xn` rows for t >= 0 (vector trajectories).
  void write_csv(std::ostream& os) const;

  /// Appends the next node; the first H+1 calls fill the history j = -H..0.
  void append(const MatrixXd& value);
  /// Left limit at t = 0; defaults to the stored value at 0.
  void set_left_limit_at_zero(const MatrixXd& value);

 private:
  const double* column(int j) const {
    return buf_.data() + static_cast<size_t>(j + H_) * stride_;
  }
  void check_index(int j) const;

  double dt_;
  int H_;
  Eigen::Index rows_, cols_, stride_;
  int last_;
  bool has_left0_ = false;
  std::vector<double> buf_;
  MatrixXd left0_;
};

/**
 * Fixed-step RK4 for the closed loop with node-aligned delay: dt divides h,
 * delayed values are linearly interpolated inside the step's own segment,
 * and the distributed term is a segment-wise trapezoid on the dt grid.
 */
class DelayIntegrator {
 public:
  DelayIntegrator(const ClosedLoopSystem& cl, double dt);

  int steps_per_delay() const { return H_; }

  /// Extends `traj` by `steps` steps. Throws DivergenceError on a non-finite state.
  void advance(Trajectory& traj, int steps) const;

 private:
  MatrixXd rhs(const Trajectory& tr, int j, int stage, const MatrixXd& Y) const;
  const MatrixXd& g_stage(int stage, int m) const;

  MatrixXd A0_, A1_;
  double dt_;
  int H_;
  bool has_delay_, has_distributed_;
  std::vector<MatrixXd> g_int_;   // G(-h + i dt), i = 0..H
  std::vector<MatrixXd> g_half_;  // G(-h + (i + 1/2) dt), i = 0..H-1
};

/// Samples a theta-grid function at -h + i*dt, i = 0..h/dt.
std::vector<MatrixXd> resample(const MatrixFunction& f, double dt);

/// Closed-loop trajectory for the initial function phi over [0, T].
Trajectory integrate_closed_loop(const ClosedLoopSystem& cl, const History& phi,
                                 double horizon, double dt);

/// ||K(t)|| <= gamma exp(-beta t) fitted on the final half of the horizon.
struct DecayFit {
  double gamma = 0.0;
  double beta = 0.0;
  bool ok = false;  ///< beta > 0 and the fit had enough points
};

struct FundamentalMatrixOptions {
  double dt = 0.0;           ///< 0 selects h/128
  double horizon = 0.0;      ///< fixed horizon; 0 grows automatically
  double max_horizon = 0.0;  ///< growth cap; 0 selects 200 h
  double block = 5.0;        ///< growth block, in delays
  double decay_ratio = 1e-6; ///< stop once the last block is below ratio * peak
};

/**
 * Fundamental matrix K(t): K(0) = I, K = 0 on [-h, 0), integrated to a
 * horizon that either is fixed or grows in blocks until K has decayed.
 */
class FundamentalMatrix {
 public:
  explicit FundamentalMatrix(Trajectory samples);

  double dt() const { return traj_.dt(); }
  double horizon() const { return traj_.horizon(); }
  double delay() const { return traj_.delay(); }
  int steps_per_delay() const { return traj_.steps_per_delay(); }
  int last_index() const { return traj_.last_index(); }
  Eigen::Index n() const { return traj_.rows(); }
  const DecayFit& decay() const { return fit_; }
  const Trajectory& samples() const { return traj_; }

  /// K(t_j) with K = 0 for j < 0 and K(0-) = 0. Throws beyond the horizon.
  MatrixXd at_index(int j, Side side = Side::kRight) const;
  /// Linear interpolation in time; zero for t < 0.
  MatrixXd at(double t, Side side = Side::kRight) const;
  double norm_at_index(int j) const;

 private:
  Trajectory traj_;
  DecayFit fit_;
  std::vector<double> norms_;
};

FundamentalMatrix fundamental_matrix(const ClosedLoopSystem& cl,
                                     const FundamentalMatrixOptions& options);
FundamentalMatrix fundamental_matrix(const ClosedLoopSystem& cl, double horizon,
                                     double dt);

/// Least-squares fit of log of the running norm envelope over [T/2, T].
/// `norms[j]` is ||K(j dt)||, j = 0..J.
DecayFit fit_decay(const std::vector<double>& norms, double dt);

/**
 * Node-aligned access to K and the Cauchy kernel
 *
 *   Khat(t, theta) = K(t - theta - h) A1 + int_{-h}^{theta} K(t - theta + xi) G(xi) dxi
 *
 * for t = j*dt and theta = -h + i*dt. `side` picks the one-sided limit of the
 * K argument, which matters only where that argument is zero.
 */
class KernelNodes {
 public:
  KernelNodes(const FundamentalMatrix& fm, const ClosedLoopSystem& cl);

  int steps_per_delay() const { return H_; }
  double dt() const { return fm_.dt(); }
  const FundamentalMatrix& fundamental() const { return fm_; }

  MatrixXd K(int j, Side side = Side::kRight) const { return fm_.at_index(j, side); }
  MatrixXd khat(int j, int i, Side side = Side::kRight) const;
  const std::vector<MatrixXd>& fine_G() const { return g_; }

 private:
  const FundamentalMatrix& fm_;
  MatrixXd A1_;
  int H_;
  std::vector<MatrixXd> g_;
};

/// Khat(t, theta) for arbitrary t in [0, T], theta in [-h, 0].
MatrixXd khat_kernel(const FundamentalMatrix& fm, const ClosedLoopSystem& cl, double t,
                     double theta, Side side = Side::kRight);

/// x(t) = K(t) phi(0) + int Khat(t, theta) phi(theta) dtheta.
VectorXd cauchy_solution(const FundamentalMatrix& fm, const ClosedLoopSystem& cl,
                         const History& phi, double t);

enum class Stability { kStable, kUnstable, kInconclusive };

struct StabilityReport {
  Stability verdict = Stability::kInconclusive;
  DecayFit fit;
  double final_ratio = 0.0;  ///< ||K(T)|| / ||K(0)||
};

/// Stable iff the fitted beta > 0 and ||K(T)|| < 1e-3 ||K(0+)||.
StabilityReport is_exponentially_stable(const FundamentalMatrix& fm);

const char* to_string(Stability s);

}  // namespace tdopt

#endif  // TDOPT_DDESIM_HPP
