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
#ifndef TDOPT_SCENARIO_HPP
#define TDOPT_SCENARIO_HPP

#include <optional>
#include <string>

#include "tdopt/bounds.hpp"
#include "tdopt/plantbench.hpp"
#include "tdopt/synthesis.hpp"

namespace tdopt {

/// Command-line values that replace the scenario's own settings.
struct ScenarioOverrides {
  std::optional<double> dt;
  std::optional<int> n_theta;
  std::optional<double> horizon;
  std::optional<double> tol;
  std::optional<int> max_iter;
  bool continuous_ref = false;
};

struct BoundsConfig {
  double alpha = 1.0;
  double t_star = 1.0;
  std::optional<BoundInputs> intermediates;  ///< bypasses the closed-loop measurements
};

struct BenchmarkConfig {
  PlantModel plant;
  ReferenceProfile reference;
  PiController pi;
  OptimalDesignOptions design;
  TrackingConfig tracking;
};

/// A validated scenario; every grid-dependent field is already on `grid`.
struct Scenario {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  SystemModel system;
  CostWeights weights;
  ControlLaw law;
  double dt;           ///< integration step, divides h and aligns with the theta grid
  double horizon;      ///< trajectory and cost horizon
  double max_horizon;  ///< fundamental-matrix growth cap (0 = default)
  History history;
  MatrixXd lyapunov_weight;  ///< M for the Lyapunov checks; defaults to Q
  BoundsConfig bounds;
  SynthesisOptions synthesis;
  std::optional<BenchmarkConfig> benchmark;
};

/// Parses and validates. Schema problems raise InputError (exit code 2).
Scenario parse_scenario(const std::string& json_text, const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides = {});

}  // namespace tdopt

#endif  // TDOPT_SCENARIO_HPP
