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
#ifndef TDOPT_LYAPMAT_HPP
#define TDOPT_LYAPMAT_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "tdopt/ddesim.hpp"

namespace tdopt {

/**
 * Weight-independent moments of the fundamental matrix,
 *
 *   Z_k[(i,a),(j,b)] = int_0^T K_ia(t) K_jb(t + k dt) dt,   k = 0..max_lag,
 *
 * so that U(k dt, M)_ab = sum_ij M_ij Z_k[(i,a),(j,b)] for any weight M.
 * Negative lags use the transposed moment, which is the direct quadrature of
 * int K^T(t) M K(t - tau) dt over the same nodes.
 */
class LyapunovBasis {
 public:
  /// Throws InstabilityError unless `fm` passes is_exponentially_stable.
  LyapunovBasis(const FundamentalMatrix& fm, int max_lag_steps);

  int max_lag_steps() const { return max_lag_; }
  double dt() const { return dt_; }
  double horizon() const { return horizon_; }
  Eigen::Index n() const { return n_; }
  const DecayFit& decay() const { return fit_; }

  /// U(k dt, M) for |k| <= max_lag_steps.
  MatrixXd at_index(int k, const MatrixXd& M) const;
  /// Linear interpolation between lag nodes.
  MatrixXd at(double tau, const MatrixXd& M) const;

  /// Bound on the neglected part int_{T-|tau|}^inf ||K^T M K(t+tau)|| dt.
  double tail_bound(double tau, double norm_M) const;

 private:
  double dt_;
  double horizon_;
  Eigen::Index n_;
  int max_lag_;
  DecayFit fit_;
  std::vector<MatrixXd> Z_;
};

/// U(tau, M) sampled on tau = k dt, |k| <= K, for a fixed weight M.
class LyapunovMatrix {
 public:
  LyapunovMatrix(std::shared_ptr<const LyapunovBasis> basis, MatrixXd M, int span_steps);

  const MatrixXd& weight() const { return M_; }
  double dt() const { return basis_->dt(); }
  int span_steps() const { return span_; }
  double span() const { return span_ * basis_->dt(); }
  const LyapunovBasis& basis() const { return *basis_; }

  /// Sample at tau = k dt, |k| <= span_steps.
  const MatrixXd& node(int k) const;
  MatrixXd at(double tau) const;
  /// Tail estimate at tau = 0 (largest over the stored span).
  double tail_estimate() const;

  /// `tau,U11..Unn` rows, row-major entry order.
  void write_csv(std::ostream& os) const;

 private:
  std::shared_ptr<const LyapunovBasis> basis_;
  MatrixXd M_;
  int span_;
  std::vector<MatrixXd> samples_;
};

/// Builds the basis (lags up to 2h) and returns U(tau, M) on [-2h, 2h].
LyapunovMatrix lyapunov_matrix(const FundamentalMatrix& fm, const MatrixXd& M);

/// Single evaluation U(tau, M) by direct trapezoid quadrature over [0, T].
MatrixXd lyapunov_matrix(const FundamentalMatrix& fm, const MatrixXd& M, double tau);

/// How the distributed term of the dynamic property is read.
enum class DistributedReading {
  kShifted,       ///< int U(tau + theta) G(theta) dtheta, the form implied by K's dynamics
  kZeroExtended,  ///< int U(tau + theta) G(theta + tau) dtheta, G = 0 outside [-h, 0]
};

struct LyapunovResiduals {
  double dyn_res = 0.0;   ///< max over tau in (0, h) of the dynamic-property defect
  double sym_res = 0.0;   ///< max over tau of ||U(-tau, M) - U(tau, M^T)^T||
  double jump_res = 0.0;  ///< ||U'(0+) - U'(0-) + M||
  double scale = 0.0;     ///< max ||U|| over the checked lags, for relative reading
};

/// Checks the dynamic, symmetry and jump properties on the stored samples.
LyapunovResiduals lyap_property_residuals(const LyapunovMatrix& lm, const ClosedLoopSystem& cl,
                                          DistributedReading reading =
                                              DistributedReading::kShifted);

}  // namespace tdopt

#endif  // TDOPT_LYAPMAT_HPP
