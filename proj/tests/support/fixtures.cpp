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
#include "fixtures.hpp"

namespace tdopt::testing {

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

TestSystem scalar_system(std::string name, double a, double b, double h, int n_theta) {
  SystemModel sys = SystemModel::without_distributed(scalar(a), scalar(b), scalar(1.0), h, n_theta);
  CostWeights w(scalar(1.0), scalar(1.0));
  ControlLaw law = ControlLaw::zero(sys);
  return TestSystem{std::move(name), std::move(sys), std::move(w), std::move(law)};
}

}  // namespace

TestSystem delay_free_scalar(int n_theta) {
  return scalar_system("delay-free scalar", -1.0, 0.0, 1.0, n_theta);
}

TestSystem pointwise_delay_scalar(int n_theta) {
  return scalar_system("pointwise-delay scalar", 0.0, -0.5, 1.0, n_theta);
}

TestSystem monotone_scalar(int n_theta) {
  return scalar_system("unstable-part scalar", 0.2, -1.0, 0.5, n_theta);
}

TestSystem distributed_2x2(int n_theta) {
  const ThetaGrid grid(1.0, n_theta);
  MatrixXd A(2, 2), B(2, 2), D(2, 1), E0(2, 2), E1(2, 2), Q(2, 2), G0(1, 2), G1(1, 2);
  A << -2.0, 0.5, 0.0, -1.5;
  B << 0.3, 0.0, 0.2, -0.4;
  D << 0.0, 1.0;
  E0 << -0.2, 0.1, 0.0, -0.3;
  E1 << -0.4, 0.0, 0.1, -0.1;
  Q << 1.0, 0.0, 0.0, 2.0;
  G0 << 0.0, -0.5;
  G1 << 0.1, -0.2;
  std::vector<MatrixXd> e;
  for (int i = 0; i < grid.size(); ++i) {
    const double c = static_cast<double>(i) / grid.intervals();
    e.push_back((1.0 - c) * E0 + c * E1);
  }
  SystemModel sys(A, B, D, 1.0, MatrixFunction(grid, e));
  CostWeights w(Q, MatrixXd::Identity(1, 1));
  ControlLaw law(G0, MatrixFunction::constant(grid, G1));
  return TestSystem{"distributed 2x2", std::move(sys), std::move(w), std::move(law)};
}

std::vector<TestSystem> core_systems(int n_theta) {
  std::vector<TestSystem> out;
  out.push_back(delay_free_scalar(n_theta));
  out.push_back(pointwise_delay_scalar(n_theta));
  out.push_back(distributed_2x2(n_theta));
  return out;
}

History random_history(const ThetaGrid& grid, Eigen::Index n, double radius, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // A few random knots, linearly interpolated onto the grid.
  const int knots = 4;
  std::vector<VectorXd> k(knots + 1);
  for (VectorXd& v : k) {
    v.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) v(a) = u(rng);
  }
  History phi = History::from_function(grid, [&](double theta) {
    const double s = (theta + grid.h()) / grid.h() * knots;
    const int i = std::min(knots - 1, static_cast<int>(s));
    const double c = s - i;
    return ((1.0 - c) * k[i] + c * k[i + 1]).eval();
  });
  return phi.scaled(radius / phi.sup_norm());
}

}  // namespace tdopt::testing
