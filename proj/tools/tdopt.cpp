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
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tdopt/errors.hpp"
#include "tdopt/report.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string out = "out";
  tdopt::ScenarioOverrides overrides;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "scenario JSON file")->required();
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--dt", f.overrides.dt, "integration step");
  cmd->add_option("--n-theta", f.overrides.n_theta, "theta-grid intervals");
  cmd->add_option("--horizon", f.overrides.horizon, "simulation horizon");
  cmd->add_option("--tol", f.overrides.tol, "policy-iteration tolerance");
  cmd->add_option("--max-iter", f.overrides.max_iter, "policy-iteration iteration cap");
  cmd->add_flag("--continuous-ref", f.overrides.continuous_ref,
                "use the continuous repair of the tracking reference");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control and Bellman-functional analysis for linear delay systems.\n"
               "Thread count: TDOPT_THREADS."};
  app.require_subcommand(1);
  Flags flags;
  using Runner = std::function<tdopt::CommandOutcome(const tdopt::Scenario&,
                                                     const std::filesystem::path&)>;
  const std::map<std::string, std::pair<std::string, Runner>> commands = {
      {"simulate", {"integrate the closed loop and write trajectory.csv", tdopt::cmd_simulate}},
      {"synthesize", {"policy iteration towards the optimal law", tdopt::cmd_synthesize}},
      {"verify", {"Lyapunov, Riccati and cost-functional checks", tdopt::cmd_verify}},
      {"bounds", {"upper and lower bounds of the Bellman functional", tdopt::cmd_bounds}},
      {"bench", {"heater tracking benchmark, optimal versus PI", tdopt::cmd_bench}},
  };
  std::map<CLI::App*, Runner> runners;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    add_common(sub, flags);
    runners[sub] = entry.second;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(tdopt::ErrorKind::kInput);
  }

  try {
    const tdopt::Scenario s = tdopt::load_scenario(flags.scenario, flags.overrides);
    for (const auto& [sub, run] : runners) {
      if (!sub->parsed()) continue;
      const tdopt::CommandOutcome res = run(s, flags.out);
      std::cout << res.summary;
      for (const std::string& w : res.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : res.files) std::cout << "wrote " << f.string() << '\n';
    }
  } catch (const tdopt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(tdopt::ErrorKind::kNumerical);
  }
  return 0;
}
