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
#ifndef TDOPT_BELLMAN_HPP
#define TDOPT_BELLMAN_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "tdopt/ddesim.hpp"
#include "tdopt/lyapmat.hpp"
#include "tdopt/sysmodel.hpp"

namespace tdopt {

/// M1 = Q + G0^T R G0, M2(theta) = G0^T R G1(theta), M3(a, b) = G1^T(a) R G1(b).
struct WeightKernels {
  MatrixXd M1;
  MatrixFunction M2;
  std::vector<MatrixXd> M3;  ///< row-major over (theta_a, theta_b) node pairs

  const ThetaGrid& grid() const { return M2.grid(); }
  const MatrixXd& m3(int a, int b) const { return M3.at(static_cast<size_t>(a) * grid().size() + b); }
};

WeightKernels weight_kernels(const CostWeights& w, const ControlLaw& law);

/// Pi0, Pi1(theta), Pi2(xi, theta) on the law's theta grid.
class BellmanKernels {
 public:
  BellmanKernels(MatrixXd pi0, MatrixFunction pi1, std::vector<MatrixXd> pi2);

  const ThetaGrid& grid() const { return pi1_.grid(); }
  Eigen::Index n() const { return pi0_.rows(); }
  const MatrixXd& pi0() const { return pi0_; }
  const MatrixFunction& pi1() const { return pi1_; }
  const MatrixXd& pi2(int xi, int theta) const;

  /// max over node pairs of ||Pi2(xi, theta)^T - Pi2(theta, xi)||.
  double pi2_asymmetry() const;

  void write_pi1_csv(std::ostream& os) const;  ///< `theta,P11..Pnn`
  void write_pi2_csv(std::ostream& os) const;  ///< `xi,theta,P11..Pnn`

 private:
  MatrixXd pi0_;
  MatrixFunction pi1_;
  std::vector<MatrixXd> pi2_;
};

/**
 * Intermediate tables for one stabilizing law. All three kernels come from
 * the aggregate
 *
 *   F(c) = int_0^inf [K^T(t) Q K(t+c) + L0^T(t) R L0(t+c)] dt,
 *   L0(t) = G0 K(t) + int G1(s) K(t+s) ds,
 *
 * written as a weighted sum of Lyapunov-matrix values U(c + offset, W), plus
 * corrections from the part of the control that still sees the initial
 * function (t + s < 0).
 */
class BellmanAssembly {
 public:
  BellmanAssembly(std::shared_ptr<const LyapunovBasis> basis, const FundamentalMatrix& fm,
                  const ClosedLoopSystem& cl, const CostWeights& w, const ControlLaw& law);

  MatrixXd pi0() const;
  MatrixFunction pi1() const;
  std::vector<MatrixXd> pi2() const;
  BellmanKernels kernels() const;

  /// F at lag k dt, |k| <= h/dt.
  MatrixXd aggregate(int k) const;

 private:
  const MatrixXd& P(int a, int theta) const { return P_[static_cast<size_t>(a) * (N_ + 1) + theta]; }

  ThetaGrid grid_;
  int H_, spc_, N_;
  MatrixXd A1_;
  std::vector<MatrixXd> G_fine_;
  std::vector<MatrixXd> F_;          // lags 0..H
  std::vector<MatrixXd> P_;          // (a = 0..H) x theta nodes
  std::vector<MatrixXd> dpi1_;       // theta nodes
  std::vector<MatrixXd> C_;          // theta nodes x theta nodes
  std::vector<MatrixXd> E3_;         // theta nodes x theta nodes
};

struct KernelBuildOptions {
  double dt = 0.0;            ///< 0 selects h/128
  double max_horizon = 0.0;   ///< 0 selects the fundamental-matrix default
};

/// close_loop, fundamental matrix, Lyapunov basis and kernel assembly.
BellmanKernels bellman_kernels(const SystemModel& sys, const CostWeights& w,
                               const ControlLaw& law, const KernelBuildOptions& options = {});

/// V(phi) by trapezoid quadrature on the theta grid.
double evaluate_functional(const BellmanKernels& k, const History& phi);

struct SimulatedCost {
  double value = 0.0;          ///< int_0^T x^T Q x + u^T R u
  double tail_estimate = 0.0;  ///< extrapolated contribution of (T, inf)
};

/// Cost of the closed loop from phi over [0, T] with u evaluated along the path.
SimulatedCost simulate_cost(const ClosedLoopSystem& cl, const ControlLaw& law,
                            const CostWeights& w, const History& phi, double horizon,
                            double dt);

}  // namespace tdopt

#endif  // TDOPT_BELLMAN_HPP
