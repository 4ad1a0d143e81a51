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
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tdopt/errors.hpp"
#include "tdopt/report.hpp"

namespace tdopt {
namespace {

const std::string kDir = TDOPT_SCENARIO_DIR;

TEST(Report, BoundsJsonCarriesChainWarningsAndNote) {
  const Scenario s = load_scenario(kDir + "/bounds_example.json");
  const BoundsReport r = lower_bound_pipeline(*s.bounds.intermediates);
  const Json j = bounds_json(r);
  EXPECT_NEAR(j["delta"].get<double>(), 3.0482e-23, 3.0482e-26);
  EXPECT_TRUE(j["warnings"].empty());
  EXPECT_EQ(j["note"].get<std::string>(), kBoundsReproductionNote);
  std::ostringstream os;
  write_bounds_table(os, r);
  EXPECT_NE(os.str().find("N_bar"), std::string::npos);
  EXPECT_NE(os.str().find("note:"), std::string::npos);
}

TEST(Report, VerifyOnLyapunovScenarioIsClean) {
  const Scenario s = load_scenario(kDir + "/delay_scalar.json");
  const VerifyReport r = verify_scenario(s);
  EXPECT_EQ(r.stability.verdict, Stability::kStable);
  EXPECT_LT(r.lyapunov.dyn_res, 1e-3);
  EXPECT_LT(r.cost_rel_error, 1e-2);
  EXPECT_LT(r.cauchy_rel_error, 1e-3);
  // Zero law is not optimal, so the Riccati defect is visible.
  EXPECT_GT(r.riccati.r1, 1e-2);
  const Json j = verify_json(r);
  EXPECT_EQ(j["stability"]["verdict"], "stable");
}

TEST(Report, SynthesisJsonListsEveryIteration) {
  const Scenario s = load_scenario(kDir + "/are_scalar.json");
  const SynthesisResult r = policy_iteration(s.system, s.weights, s.law, s.synthesis);
  const Json j = synthesis_json(r);
  EXPECT_EQ(j["status"], "converged");
  EXPECT_EQ(j["trace"].size(), r.trace.size());
  EXPECT_NEAR(j["gamma0"][0][0].get<double>(), 1.0 - std::sqrt(2.0), 1e-4);
  for (const auto& it : j["trace"]) {
    EXPECT_TRUE(it.contains("cost"));
    EXPECT_TRUE(it["residuals"].contains("r5"));
    EXPECT_TRUE(it["fit"].contains("beta"));
  }
}

TEST(Report, Gamma1CsvHasHeaderAndNodeRows) {
  const Scenario s = load_scenario(kDir + "/distributed_2x2.json");
  std::ostringstream os;
  write_gamma1_csv(os, s.law);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "theta,G11,G12");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + s.system.grid().size());
}

TEST(Report, BenchRequiresBenchmarkSection) {
  const Scenario s = load_scenario(kDir + "/are_scalar.json");
  EXPECT_THROW(cmd_bench(s, std::filesystem::temp_directory_path() / "tdopt_no_bench"), InputError);
}

}  // namespace
}  // namespace tdopt
