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
#ifndef TDOPT_BOUNDS_HPP
#define TDOPT_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tdopt/bellman.hpp"

namespace tdopt {

/// V(phi) <= C1 ||phi||_h^2 with C1 = ||Pi0|| + 2 X1 + X2.
struct UpperBound {
  double pi0_norm = 0.0;
  double X1 = 0.0;  ///< int ||Pi1(theta)|| dtheta
  double X2 = 0.0;  ///< double integral of ||Pi2(xi, theta)||
  double C1 = 0.0;
};

UpperBound upper_bound(const BellmanKernels& k);

/// Scalars feeding the lower-bound chain. They are either measured on a
/// closed loop (bound_inputs) or supplied directly, e.g. published values.
struct BoundInputs {
  double h = 0.0;
  double norm_A0 = 0.0;
  double norm_A1 = 0.0;
  double g = 0.0;             ///< sup ||G(theta)||
  double L = 0.0;             ///< ||A0|| + ||A1|| + g h
  double C2 = 0.0;            ///< ||A0|| + ||A1|| + int ||G||
  double alpha = 0.0;         ///< radius with ||phi||_h <= alpha
  double t_star = 1.0;
  double lambda_min_Q = 0.0;
  double phi0_norm = 0.0;     ///< ||phi(0)||
  std::optional<double> phi_integral;  ///< int ||phi(theta)|| dtheta; alpha h if absent
};

BoundInputs bound_inputs(const ClosedLoopSystem& cl, const MatrixXd& Q, double alpha,
                         double t_star, double phi0_norm);

struct BoundsReport {
  BoundInputs inputs;
  double m0 = 0.0;                 ///< ||phi(0)|| + (||A1|| + g h) int ||phi||
  double m0_limit = 0.0;           ///< alpha (1 + (||A1|| + g h) h)
  double N_t_star = 0.0;           ///< alpha (1 + ||A1|| h + g h^2) e^{L t*}
  double N_bar = 0.0;              ///< max{C2 L N(t*), alpha / (2 t*)}
  double delta = 0.0;              ///< ||phi(0)|| / (2 N_bar)
  double cubic_coefficient = 0.0;  ///< lambda_min(Q) / (8 N_bar)
  std::optional<UpperBound> upper;
  std::vector<std::string> warnings;

  /// u_alpha(r) = cubic_coefficient r^3.
  double lower_bound(double r) const { return cubic_coefficient * r * r * r; }
};

/// Evaluates the chain in order; precondition failures become warnings.
BoundsReport lower_bound_pipeline(const BoundInputs& in);

struct VelocityCheck {
  double max_ratio = 0.0;  ///< max ||x'(t)|| / ||x_t||_h over the samples
  double C2 = 0.0;
  double tol = 0.0;
  bool holds = true;
};

/// Central-difference x' against C2 on every interior sample, t > 0.
VelocityCheck velocity_bound_check(const ClosedLoopSystem& cl,
                                   const std::vector<Trajectory>& trajectories,
                                   double tol = 5e-2);

}  // namespace tdopt

#endif  // TDOPT_BOUNDS_HPP
