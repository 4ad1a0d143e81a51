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
#ifndef TDOPT_SYSMODEL_HPP
#define TDOPT_SYSMODEL_HPP

#include <functional>

#include "tdopt/grid.hpp"
#include "tdopt/linalg.hpp"

namespace tdopt {

/**
 * Open-loop plant
 *
 *   x'(t) = A x(t) + B x(t-h) + int_{-h}^{0} E(theta) x(t+theta) dtheta + D u(t)
 *
 * with n states and r <= n inputs. E lives on the model's theta grid.
 */
class SystemModel {
 public:
  SystemModel(MatrixXd A, MatrixXd B, MatrixXd D, double h, MatrixFunction E);

  /// Convenience: E identically zero on a grid with `n_theta` cells.
  static SystemModel without_distributed(MatrixXd A, MatrixXd B, MatrixXd D,
                                         double h,
                                         int n_theta = ThetaGrid::kDefaultIntervals);

  Eigen::Index n() const { return A_.rows(); }
  Eigen::Index r() const { return D_.cols(); }
  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& D() const { return D_; }
  double h() const { return h_; }
  const MatrixFunction& E() const { return E_; }
  const ThetaGrid& grid() const { return E_.grid(); }

 private:
  MatrixXd A_, B_, D_;
  double h_;
  MatrixFunction E_;
};

/// Quadratic cost weights; both must be symmetric positive definite.
class CostWeights {
 public:
  CostWeights(MatrixXd Q, MatrixXd R);

  const MatrixXd& Q() const { return Q_; }
  const MatrixXd& R() const { return R_; }
  const MatrixXd& R_inverse() const { return R_inv_; }

 private:
  MatrixXd Q_, R_, R_inv_;
};

/// u(t) = Gamma0 x(t) + int Gamma1(theta) x(t+theta) dtheta.
class ControlLaw {
 public:
  ControlLaw(MatrixXd gamma0, MatrixFunction gamma1);

  static ControlLaw zero(const SystemModel& sys);
  static ControlLaw proportional(const SystemModel& sys, const MatrixXd& gamma0);

  const MatrixXd& gamma0() const { return gamma0_; }
  const MatrixFunction& gamma1() const { return gamma1_; }

  /// max(|dGamma0|, max_i |dGamma1(theta_i)|), the policy-iteration metric.
  double distance(const ControlLaw& other) const;

  /// this + weight * (other - this), node-wise.
  ControlLaw blend(const ControlLaw& other, double weight) const;

 private:
  MatrixXd gamma0_;
  MatrixFunction gamma1_;
};

/**
 * Closed loop x' = A0 x + A1 x(t-h) + int G(theta) x(t+theta) dtheta with
 * A0 = A + D Gamma0, A1 = B, G = E + D Gamma1. Built only by close_loop().
 */
class ClosedLoopSystem {
 public:
  const MatrixXd& A0() const { return A0_; }
  const MatrixXd& A1() const { return A1_; }
  const MatrixFunction& G() const { return G_; }
  double h() const { return h_; }
  Eigen::Index n() const { return A0_.rows(); }
  const ThetaGrid& grid() const { return G_.grid(); }
  bool has_distributed() const { return has_distributed_; }

  /// Raw constructor for closed loops that are not tied to a plant model
  /// (test systems, benchmark plant). Same validation as close_loop().
  static ClosedLoopSystem from_parts(MatrixXd A0, MatrixXd A1, MatrixFunction G,
                                     double h);

 private:
  ClosedLoopSystem(MatrixXd A0, MatrixXd A1, MatrixFunction G, double h);
  friend ClosedLoopSystem close_loop(const SystemModel&, const ControlLaw&);

  MatrixXd A0_, A1_;
  MatrixFunction G_;
  double h_;
  bool has_distributed_;
};

ClosedLoopSystem close_loop(const SystemModel& sys, const ControlLaw& law);

/// max over grid nodes of the spectral norm of G(theta_i).
double sup_norm_G(const ClosedLoopSystem& cl);

/// Initial function phi on [-h, 0], piecewise linear between grid nodes.
class History {
 public:
  History(ThetaGrid grid, std::vector<VectorXd> samples);

  static History constant(const ThetaGrid& grid, const VectorXd& value);
  static History from_function(const ThetaGrid& grid,
                               const std::function<VectorXd(double)>& phi);

  const ThetaGrid& grid() const { return grid_; }
  Eigen::Index dim() const { return samples_.front().size(); }
  const VectorXd& node(int i) const { return samples_.at(i); }
  const VectorXd& at_zero() const { return samples_.back(); }
  VectorXd at(double theta) const;

  /// ||phi||_h, taken as the max over nodes (exact for piecewise linear).
  double sup_norm() const;

  History scaled(double c) const;

 private:
  ThetaGrid grid_;
  std::vector<VectorXd> samples_;
};

}  // namespace tdopt

#endif  // TDOPT_SYSMODEL_HPP
