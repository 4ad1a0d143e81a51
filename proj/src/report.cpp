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
#include "tdopt/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

namespace fs = std::filesystem;

namespace {

// Writes through `fill` and records the path.
template <class Fill>
void write_file(CommandOutcome& out, const fs::path& path, Fill fill) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path.string() + "'");
  fill(os);
  if (!os) throw InputError("write failed for '" + path.string() + "'");
  out.files.push_back(path);
}

void write_json(CommandOutcome& out, const fs::path& path, const Json& j) {
  write_file(out, path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

void prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InputError("cannot create output directory '" + out.string() + "': " + ec.message());
}

Json residuals_json(const RiccatiResiduals& r) {
  return Json{{"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}, {"r4", r.r4}, {"r5", r.r5}};
}

Json fit_json(const DecayFit& f) {
  return Json{{"gamma", f.gamma}, {"beta", f.beta}, {"ok", f.ok}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string matrix_text(const MatrixXd& m) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    if (a) os << "; ";
    for (Eigen::Index b = 0; b < m.cols(); ++b) os << (b ? " " : "") << fmt(m(a, b));
  }
  os << ']';
  return os.str();
}

std::string stability_message(const StabilityReport& st) {
  std::ostringstream os;
  os << "closed loop is not exponentially stable (" << to_string(st.verdict)
     << "): decay fit gamma=" << st.fit.gamma << " beta=" << st.fit.beta
     << ", ||K(T)||/||K(0)||=" << st.final_ratio;
  return os.str();
}

}  // namespace

Json matrix_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
    rows.push_back(row);
  }
  return rows;
}

Json synthesis_json(const SynthesisResult& r) {
  Json trace = Json::array();
  for (const IterationRecord& it : r.trace)
    trace.push_back(Json{{"iteration", it.iteration},
                         {"cost", it.cost},
                         {"residuals", residuals_json(it.residuals)},
                         {"fit", fit_json(it.fit)},
                         {"law_change", it.law_change},
                         {"step", it.step},
                         {"gamma0_norm", it.gamma0_norm}});
  return Json{{"status", to_string(r.status)},
              {"message", r.message},
              {"iterations", r.trace.size()},
              {"min_R_eigenvalue", r.min_R_eigenvalue},
              {"gamma0", matrix_json(r.law.gamma0())},
              {"gamma1_csv", "gamma1.csv"},
              {"pi0", matrix_json(r.kernels.pi0())},
              {"trace", trace}};
}

Json bounds_json(const BoundsReport& r) {
  const BoundInputs& in = r.inputs;
  Json inputs{{"h", in.h},
              {"norm_A0", in.norm_A0},
              {"norm_A1", in.norm_A1},
              {"g", in.g},
              {"L", in.L},
              {"C2", in.C2},
              {"alpha", in.alpha},
              {"t_star", in.t_star},
              {"lambda_min_Q", in.lambda_min_Q},
              {"phi0_norm", in.phi0_norm}};
  if (in.phi_integral) inputs["phi_integral"] = *in.phi_integral;
  Json j{{"inputs", inputs},
         {"m0", r.m0},
         {"m0_limit", r.m0_limit},
         {"N_t_star", r.N_t_star},
         {"N_bar", r.N_bar},
         {"delta", r.delta},
         {"cubic_coefficient", r.cubic_coefficient},
         {"lower_bound_at_phi0", r.lower_bound(in.phi0_norm)}};
  if (r.upper)
    j["upper"] = Json{{"pi0_norm", r.upper->pi0_norm},
                      {"X1", r.upper->X1},
                      {"X2", r.upper->X2},
                      {"C1", r.upper->C1}};
  j["warnings"] = r.warnings;
  j["note"] = kBoundsReproductionNote;
  return j;
}

Json tracking_summary_json(const TrackingResult& r) {
  return Json{{"controller", r.controller},
              {"iae", r.iae},
              {"energy", r.energy_wh},
              {"energy_unit", "Wh"},
              {"u_min", r.u_low},
              {"u_max", r.u_high},
              {"samples", r.rows.size()}};
}

void write_bounds_table(std::ostream& os, const BoundsReport& r) {
  const BoundInputs& in = r.inputs;
  std::vector<std::pair<std::string, double>> rows = {
      {"h", in.h},
      {"||A0||", in.norm_A0},
      {"||A1||", in.norm_A1},
      {"g = sup ||G||", in.g},
      {"L", in.L},
      {"C2", in.C2},
      {"alpha", in.alpha},
      {"t*", in.t_star},
      {"lambda_min(Q)", in.lambda_min_Q},
      {"||phi(0)||", in.phi0_norm},
      {"m0", r.m0},
      {"m0 limit", r.m0_limit},
      {"N(t*)", r.N_t_star},
      {"N_bar", r.N_bar},
      {"delta", r.delta},
      {"cubic coefficient", r.cubic_coefficient},
      {"u_alpha(||phi(0)||)", r.lower_bound(in.phi0_norm)}};
  if (r.upper) {
    rows.push_back({"||Pi0||", r.upper->pi0_norm});
    rows.push_back({"X1", r.upper->X1});
    rows.push_back({"X2", r.upper->X2});
    rows.push_back({"C1", r.upper->C1});
  }
  for (const auto& [name, value] : rows)
    os << std::left << std::setw(22) << name << std::setprecision(6) << std::scientific << value
       << '\n';
  os << std::defaultfloat;
  for (const std::string& w : r.warnings) os << "warning: " << w << '\n';
  os << "note: " << kBoundsReproductionNote << '\n';
}

void write_gamma1_csv(std::ostream& os, const ControlLaw& law) {
  const MatrixFunction& g = law.gamma1();
  os << "theta";
  for (Eigen::Index a = 0; a < g.rows(); ++a)
    for (Eigen::Index b = 0; b < g.cols(); ++b) os << ",G" << a + 1 << b + 1;
  os << '\n' << std::setprecision(12);
  for (int i = 0; i < g.grid().size(); ++i) {
    os << g.grid().node(i);
    const MatrixXd& m = g.node(i);
    for (Eigen::Index a = 0; a < m.rows(); ++a)
      for (Eigen::Index b = 0; b < m.cols(); ++b) os << ',' << m(a, b);
    os << '\n';
  }
}

VerifyReport verify_scenario(const Scenario& s) {
  VerifyReport r;
  const ClosedLoopSystem cl = close_loop(s.system, s.law);
  FundamentalMatrixOptions fo;
  fo.dt = s.dt;
  fo.max_horizon = s.max_horizon;
  const FundamentalMatrix fm = fundamental_matrix(cl, fo);
  r.stability = is_exponentially_stable(fm);
  if (r.stability.verdict != Stability::kStable)
    throw InstabilityError(stability_message(r.stability));

  const int H = fm.steps_per_delay();
  auto basis = std::make_shared<const LyapunovBasis>(fm, 2 * H);
  const LyapunovMatrix lm(basis, s.lyapunov_weight, 2 * H);
  r.lyapunov = lyap_property_residuals(lm, cl);

  const BellmanKernels k = BellmanAssembly(basis, fm, cl, s.weights, s.law).kernels();
  r.riccati = riccati_residuals(k, s.system, s.weights);
  r.pi2_asymmetry = k.pi2_asymmetry();
  r.functional = evaluate_functional(k, s.history);
  const double T = std::max(s.horizon, fm.horizon());
  const SimulatedCost J = simulate_cost(cl, s.law, s.weights, s.history, T, s.dt);
  r.simulated_cost = J.value + J.tail_estimate;
  r.cost_rel_error = std::abs(r.functional - r.simulated_cost) /
                     std::max(std::abs(r.simulated_cost), 1e-300);

  const Trajectory x = integrate_closed_loop(cl, s.history, 3.0 * s.system.h(), s.dt);
  double dev = 0.0, peak = 0.0;
  for (int j = 0; j <= x.last_index(); ++j) {
    const VectorXd ref = x.sample(j);
    dev = std::max(dev, (cauchy_solution(fm, cl, s.history, j * s.dt) - ref).norm());
    peak = std::max(peak, ref.norm());
  }
  r.cauchy_rel_error = peak > 0.0 ? dev / peak : dev;
  return r;
}

Json verify_json(const VerifyReport& r) {
  return Json{{"stability",
               Json{{"verdict", to_string(r.stability.verdict)},
                    {"fit", fit_json(r.stability.fit)},
                    {"final_ratio", r.stability.final_ratio}}},
              {"lyapunov",
               Json{{"dyn_res", r.lyapunov.dyn_res},
                    {"sym_res", r.lyapunov.sym_res},
                    {"jump_res", r.lyapunov.jump_res},
                    {"scale", r.lyapunov.scale}}},
              {"riccati", residuals_json(r.riccati)},
              {"functional", r.functional},
              {"simulated_cost", r.simulated_cost},
              {"cost_rel_error", r.cost_rel_error},
              {"cauchy_rel_error", r.cauchy_rel_error},
              {"pi2_asymmetry", r.pi2_asymmetry}};
}

CommandOutcome cmd_simulate(const Scenario& s, const fs::path& out) {
  prepare(out);
  CommandOutcome res;
  std::ostringstream sum;
  if (s.benchmark) {
    const BenchmarkConfig& b = *s.benchmark;
    const TrackingResult tr = run_tracking(b.plant, b.reference, b.pi, b.tracking);
    write_file(res, out / "trajectory.csv", [&](std::ostream& os) { write_tracking_csv(os, tr); });
    sum << "simulated plant with PI control: " << tr.rows.size() << " samples, IAE "
        << fmt(tr.iae) << '\n';
  } else {
    const ClosedLoopSystem cl = close_loop(s.system, s.law);
    const Trajectory x = integrate_closed_loop(cl, s.history, s.horizon, s.dt);
    write_file(res, out / "trajectory.csv", [&](std::ostream& os) { x.write_csv(os); });
    sum << "simulated " << x.last_index() + 1 << " samples to t=" << fmt(x.horizon()) << '\n';
  }
  res.summary = sum.str();
  return res;
}

CommandOutcome cmd_synthesize(const Scenario& s, const fs::path& out) {
  prepare(out);
  CommandOutcome res;
  const SynthesisResult r = policy_iteration(s.system, s.weights, s.law, s.synthesis);
  write_json(res, out / "synthesis.json", synthesis_json(r));
  write_file(res, out / "gamma1.csv", [&](std::ostream& os) { write_gamma1_csv(os, r.law); });
  write_file(res, out / "pi1.csv", [&](std::ostream& os) { r.kernels.write_pi1_csv(os); });
  if (r.status != SynthesisStatus::kConverged) res.warnings.push_back(r.message);
  std::ostringstream sum;
  sum << "status " << to_string(r.status) << " after " << r.trace.size() << " iteration(s)\n"
      << "Gamma0 = " << matrix_text(r.law.gamma0()) << '\n'
      << "Pi0 = " << matrix_text(r.kernels.pi0()) << '\n';
  res.summary = sum.str();
  return res;
}

CommandOutcome cmd_verify(const Scenario& s, const fs::path& out) {
  prepare(out);
  CommandOutcome res;
  const VerifyReport r = verify_scenario(s);
  write_json(res, out / "verify.json", verify_json(r));
  const ClosedLoopSystem cl = close_loop(s.system, s.law);
  FundamentalMatrixOptions fo;
  fo.dt = s.dt;
  fo.max_horizon = s.max_horizon;
  const LyapunovMatrix lm = lyapunov_matrix(fundamental_matrix(cl, fo), s.lyapunov_weight);
  write_file(res, out / "lyapunov.csv", [&](std::ostream& os) { lm.write_csv(os); });
  std::ostringstream sum;
  sum << "stability " << to_string(r.stability.verdict) << " (beta " << fmt(r.stability.fit.beta)
      << ")\n"
      << "lyapunov dyn " << fmt(r.lyapunov.dyn_res) << " sym " << fmt(r.lyapunov.sym_res)
      << " jump " << fmt(r.lyapunov.jump_res) << '\n'
      << "riccati r1..r5 " << fmt(r.riccati.r1) << ' ' << fmt(r.riccati.r2) << ' '
      << fmt(r.riccati.r3) << ' ' << fmt(r.riccati.r4) << ' ' << fmt(r.riccati.r5) << '\n'
      << "V " << fmt(r.functional) << " J " << fmt(r.simulated_cost) << " rel "
      << fmt(r.cost_rel_error) << '\n'
      << "cauchy rel " << fmt(r.cauchy_rel_error) << '\n';
  res.summary = sum.str();
  return res;
}

CommandOutcome cmd_bounds(const Scenario& s, const fs::path& out) {
  prepare(out);
  CommandOutcome res;
  BoundsReport rep;
  if (s.bounds.intermediates) {
    rep = lower_bound_pipeline(*s.bounds.intermediates);
  } else {
    const ClosedLoopSystem cl = close_loop(s.system, s.law);
    const BoundInputs in = bound_inputs(cl, s.weights.Q(), s.bounds.alpha, s.bounds.t_star,
                                        s.history.at_zero().norm());
    rep = lower_bound_pipeline(in);
    KernelBuildOptions ko;
    ko.dt = s.dt;
    ko.max_horizon = s.max_horizon;
    rep.upper = upper_bound(bellman_kernels(s.system, s.weights, s.law, ko));
  }
  write_json(res, out / "bounds.json", bounds_json(rep));
  std::ostringstream table;
  write_bounds_table(table, rep);
  write_file(res, out / "bounds.txt", [&](std::ostream& os) { os << table.str(); });
  res.warnings = rep.warnings;
  res.summary = table.str();
  return res;
}

CommandOutcome cmd_bench(const Scenario& s, const fs::path& out) {
  if (!s.benchmark) throw InputError("scenario has no benchmark section");
  prepare(out);
  CommandOutcome res;
  const BenchmarkConfig& b = *s.benchmark;
  const OptimalDesign design = design_optimal_controller(b.plant, b.design);
  const TrackingResult opt = run_tracking(b.plant, b.reference, design.controller, b.tracking);
  const TrackingResult pi = run_tracking(b.plant, b.reference, b.pi, b.tracking);
  write_file(res, out / "tracking_optimal.csv", [&](std::ostream& os) { write_tracking_csv(os, opt); });
  write_file(res, out / "tracking_pi.csv", [&](std::ostream& os) { write_tracking_csv(os, pi); });
  const bool ordering = opt.iae <= pi.iae;
  Json j{{"controllers", Json::array({tracking_summary_json(opt), tracking_summary_json(pi)})},
         {"optimal_iae_not_above_pi", ordering},
         {"design",
          Json{{"status", to_string(design.synthesis.status)},
               {"iterations", design.synthesis.trace.size()},
               {"gamma0", design.controller.law.gamma0()(0, 0)},
               {"input_scale", design.controller.input_scale},
               {"Q", b.design.Q},
               {"R", b.design.R}}},
         {"published_hardware_context",
          Json{{"optimal_iae", PublishedTable::kOptimalIae},
               {"pi_iae", PublishedTable::kPiIae},
               {"optimal_energy_wh", PublishedTable::kOptimalEnergyWh},
               {"pi_energy_wh", PublishedTable::kPiEnergyWh},
               {"note", "hardware measurements, shown for context only"}}}};
  write_json(res, out / "bench.json", j);
  if (!ordering) res.warnings.push_back("simulated optimal IAE exceeds the PI IAE");
  std::ostringstream sum;
  sum << std::left << std::setw(12) << "controller" << std::setw(14) << "IAE" << std::setw(14)
      << "energy[Wh]" << "u range\n";
  for (const TrackingResult* t : {&opt, &pi})
    sum << std::setw(12) << t->controller << std::setw(14) << fmt(t->iae) << std::setw(14)
        << fmt(t->energy_wh) << '[' << fmt(t->u_low) << ", " << fmt(t->u_high) << "]\n";
  sum << "published hardware (context only): optimal IAE " << PublishedTable::kOptimalIae
      << ", PI IAE " << PublishedTable::kPiIae << ", energy " << PublishedTable::kOptimalEnergyWh
      << " / " << PublishedTable::kPiEnergyWh << " Wh\n";
  res.summary = sum.str();
  return res;
}

}  // namespace tdopt
