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
#ifndef TDOPT_TESTS_FIXTURES_HPP
#define TDOPT_TESTS_FIXTURES_HPP

#include <random>
#include <string>
#include <vector>

#include "tdopt/sysmodel.hpp"

namespace tdopt::testing {

/// A plant, weights and a stabilizing law sharing one theta grid.
struct TestSystem {
  std::string name;
  SystemModel sys;
  CostWeights w;
  ControlLaw law;
};

/// x' = -x + u, no delay terms; Q = R = 1, zero law.
TestSystem delay_free_scalar(int n_theta = 32);
/// x' = -0.5 x(t-1) + u; Q = R = 1, zero law.
TestSystem pointwise_delay_scalar(int n_theta = 32);
/// 2 x 2 with pointwise and distributed delay and a nonzero law.
TestSystem distributed_2x2(int n_theta = 32);
/// x' = 0.2 x - x(t-0.5) + u; Q = R = 1, zero law.
TestSystem monotone_scalar(int n_theta = 32);

/// The three systems of the Lyapunov and cost checks.
std::vector<TestSystem> core_systems(int n_theta = 32);

/// Random piecewise-linear history with ||phi||_h = radius exactly.
History random_history(const ThetaGrid& grid, Eigen::Index n, double radius, std::mt19937& rng);

}  // namespace tdopt::testing

#endif  // TDOPT_TESTS_FIXTURES_HPP
