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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const std::string kCli = TDOPT_CLI;
const std::string kDir = TDOPT_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tdopt_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string err;
};

CliRun run(const std::string& args, const fs::path& work, const std::string& env = "") {
  const fs::path err = work / "stderr.txt";
  const std::string cmd = env + " \"" + kCli + "\" " + args + " > \"" + (work / "stdout.txt").string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream buf;
  buf << in.rdbuf();
  return CliRun{WEXITSTATUS(status), buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

TEST(Cli, SimulateScalarWritesTwoColumnsStartingAtHistory) {
  const fs::path w = scratch("sim");
  write(w / "s.json", R"({"schema_version": 1, "n": 1, "r": 1, "A": -1, "B": -0.5, "D": 1, "h": 1,
    "Q": 1, "R": 1, "grid": {"horizon": 2}, "history": {"kind": "constant", "value": [0.75]}})");
  ASSERT_EQ(run("simulate --scenario " + (w / "s.json").string() + " --out " + (w / "o").string(), w).code, 0);
  const auto rows = lines(w / "o" / "trajectory.csv");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0], "t,x1");
  EXPECT_EQ(rows[1], "0,0.75");
  EXPECT_EQ(rows.size(), 1u + 257u);
}

TEST(Cli, SimulatePlantProduces3601Samples) {
  const fs::path w = scratch("plant");
  ASSERT_EQ(run("simulate --scenario " + kDir + "/heater_plant.json --out " + (w / "o").string(), w).code, 0);
  EXPECT_EQ(lines(w / "o" / "trajectory.csv").size(), 1u + 3601u);
}

TEST(Cli, MalformedScenarioExitsWithSchemaCode) {
  const fs::path w = scratch("bad");
  write(w / "s.json", "{\"schema_version\": 1, ");
  const CliRun r = run("verify --scenario " + (w / "s.json").string() + " --out " + (w / "o").string(), w);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("JSON"), std::string::npos) << r.err;
  EXPECT_EQ(run("verify --scenario " + kDir + "/are_scalar.json --bogus", w).code, 2);
  EXPECT_EQ(run("", w).code, 2);
}

TEST(Cli, UnstableInitialLawExitsWithInstabilityCodeNamingTheFit) {
  const fs::path w = scratch("unstable");
  write(w / "s.json", R"({"schema_version": 1, "n": 1, "r": 1, "A": 0.5, "B": 0, "D": 1, "h": 1,
    "Q": 1, "R": 1, "grid": {"n_theta": 8, "max_horizon": 30}})");
  const CliRun r = run("synthesize --scenario " + (w / "s.json").string() + " --out " + (w / "o").string(), w);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("beta"), std::string::npos) << r.err;
}

TEST(Cli, SynthesizeDelayFreeReportsRiccatiGain) {
  const fs::path w = scratch("are");
  ASSERT_EQ(run("synthesize --scenario " + kDir + "/are_scalar.json --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "synthesis.json"));
  EXPECT_EQ(j["status"], "converged");
  EXPECT_NEAR(j["gamma0"][0][0].get<double>(), 1.0 - std::sqrt(2.0), 1e-4);
  EXPECT_TRUE(fs::exists(w / "o" / "gamma1.csv"));
  EXPECT_TRUE(fs::exists(w / "o" / "pi1.csv"));
}

TEST(Cli, SynthesizeFromConvergedLawTakesOneIteration) {
  const fs::path w = scratch("conv");
  write(w / "s.json", R"({"schema_version": 1, "n": 1, "r": 1, "A": -1, "B": 0, "D": 1, "h": 1,
    "Q": 1, "R": 1, "grid": {"n_theta": 16}, "law": {"Gamma0": -0.41421356237}})");
  ASSERT_EQ(run("synthesize --tol 1e-4 --scenario " + (w / "s.json").string() + " --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "synthesis.json"));
  EXPECT_EQ(j["status"], "converged");
  EXPECT_EQ(j["iterations"], 1);
}

TEST(Cli, VerifyZeroWeightGivesExactlyZeroLyapunovResiduals) {
  const fs::path w = scratch("zero");
  write(w / "s.json", R"({"schema_version": 1, "n": 1, "r": 1, "A": 0, "B": -0.5, "D": 1, "h": 1,
    "Q": 1, "R": 1, "grid": {"n_theta": 16}, "lyapunov_weight": 0})");
  ASSERT_EQ(run("verify --scenario " + (w / "s.json").string() + " --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "verify.json"));
  EXPECT_EQ(j["lyapunov"]["dyn_res"].get<double>(), 0.0);
  EXPECT_EQ(j["lyapunov"]["sym_res"].get<double>(), 0.0);
  EXPECT_EQ(j["lyapunov"]["jump_res"].get<double>(), 0.0);
}

TEST(Cli, VerifyNonOptimalLawKeepsCostIdentityButShowsRiccatiDefect) {
  const fs::path w = scratch("rand");
  ASSERT_EQ(run("verify --scenario " + kDir + "/distributed_2x2.json --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "verify.json"));
  EXPECT_LT(j["cost_rel_error"].get<double>(), 1e-2);
  EXPECT_GT(j["riccati"]["r3"].get<double>(), 1e-2);
}

TEST(Cli, BoundsReproducePublishedDeltaAndWarnOnSmallAlpha) {
  const fs::path w = scratch("bounds");
  ASSERT_EQ(run("bounds --scenario " + kDir + "/bounds_example.json --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "bounds.json"));
  EXPECT_NEAR(j["delta"].get<double>(), 3.0482e-23, 3.0482e-26);
  EXPECT_TRUE(fs::exists(w / "o" / "bounds.txt"));

  write(w / "s.json", R"({"schema_version": 1, "n": 1, "r": 1, "A": -1, "B": 0, "D": 1, "h": 1,
    "Q": 1, "R": 1, "grid": {"n_theta": 8}, "bounds": {"alpha": 0.1, "t_star": 1}})");
  const CliRun r = run("bounds --scenario " + (w / "s.json").string() + " --out " + (w / "o2").string(), w);
  EXPECT_EQ(r.code, 0);
  const auto k = nlohmann::json::parse(slurp(w / "o2" / "bounds.json"));
  EXPECT_EQ(k["inputs"]["g"].get<double>(), 0.0);
  EXPECT_GT(k["delta"].get<double>(), 1.0);
  EXPECT_FALSE(k["warnings"].empty());
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, BenchEmitsBothControllersWithinSaturation) {
  const fs::path w = scratch("bench");
  ASSERT_EQ(run("bench --scenario " + kDir + "/heater_plant.json --out " + (w / "o").string(), w).code, 0);
  const auto j = nlohmann::json::parse(slurp(w / "o" / "bench.json"));
  ASSERT_EQ(j["controllers"].size(), 2u);
  for (const auto& c : j["controllers"]) {
    EXPECT_GE(c["u_min"].get<double>(), 0.0);
    EXPECT_LE(c["u_max"].get<double>(), 120.0);
    EXPECT_TRUE(c.contains("iae"));
    EXPECT_TRUE(c.contains("energy"));
  }
  EXPECT_EQ(j["published_hardware_context"]["pi_iae"].get<double>(), 1683.13);
}

TEST(Cli, OutputsAreByteIdenticalAcrossRunsAndThreadCounts) {
  const fs::path w = scratch("det");
  const std::string args = "verify --scenario " + kDir + "/distributed_2x2.json --out ";
  ASSERT_EQ(run(args + (w / "a").string(), w, "TDOPT_THREADS=1").code, 0);
  ASSERT_EQ(run(args + (w / "b").string(), w, "TDOPT_THREADS=1").code, 0);
  ASSERT_EQ(run(args + (w / "c").string(), w, "TDOPT_THREADS=3").code, 0);
  for (const char* f : {"verify.json", "lyapunov.csv"}) {
    EXPECT_EQ(slurp(w / "a" / f), slurp(w / "b" / f)) << f;
    EXPECT_EQ(slurp(w / "a" / f), slurp(w / "c" / f)) << f;
  }
}

}  // namespace
