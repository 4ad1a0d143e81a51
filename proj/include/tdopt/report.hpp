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
#ifndef TDOPT_REPORT_HPP
#define TDOPT_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdopt/scenario.hpp"

namespace tdopt {

using Json = nlohmann::ordered_json;

/// Note attached to every bounds report.
inline constexpr const char* kBoundsReproductionNote =
    "End-to-end reproduction of the published bound example is not possible: the "
    "closed-loop gains it uses are not given, so only the arithmetic chain is "
    "checked, from supplied intermediate constants.";

Json matrix_json(const MatrixXd& m);
Json synthesis_json(const SynthesisResult& r);
Json bounds_json(const BoundsReport& r);
Json tracking_summary_json(const TrackingResult& r);

/// Aligned two-column table of every constant in the chain.
void write_bounds_table(std::ostream& os, const BoundsReport& r);
/// `theta,G11..Grn` rows of Gamma1.
void write_gamma1_csv(std::ostream& os, const ControlLaw& law);

/// Numerical checks run by the verify command.
struct VerifyReport {
  StabilityReport stability;
  LyapunovResiduals lyapunov;
  RiccatiResiduals riccati;
  double functional = 0.0;       ///< V(phi)
  double simulated_cost = 0.0;   ///< J(phi) including the tail estimate
  double cost_rel_error = 0.0;
  double cauchy_rel_error = 0.0; ///< over [0, 3h]
  double pi2_asymmetry = 0.0;
};

VerifyReport verify_scenario(const Scenario& s);
Json verify_json(const VerifyReport& r);

/// What a command produced; `summary` is printed on stdout.
struct CommandOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::string summary;
};

/// Trajectory CSV of the scenario's law, or the PI tracking run for plant scenarios.
CommandOutcome cmd_simulate(const Scenario& s, const std::filesystem::path& out);
/// Policy iteration from the scenario's law: synthesis.json, gamma1.csv, pi1.csv.
CommandOutcome cmd_synthesize(const Scenario& s, const std::filesystem::path& out);
/// Residuals and the functional-versus-cost check: verify.json, lyapunov.csv.
CommandOutcome cmd_verify(const Scenario& s, const std::filesystem::path& out);
/// bounds.json and bounds.txt.
CommandOutcome cmd_bounds(const Scenario& s, const std::filesystem::path& out);
/// Optimal versus PI tracking: bench.json and one CSV per controller.
CommandOutcome cmd_bench(const Scenario& s, const std::filesystem::path& out);

}  // namespace tdopt

#endif  // TDOPT_REPORT_HPP
