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
#include "tdopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "tdopt/errors.hpp"

namespace tdopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError("scenario " + where + ": " + what);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) fail(where, "unknown field '" + it.key() + "'");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing required field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "number is not finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

// Row-major array of arrays; a bare number is accepted for 1 x 1.
MatrixXd matrix(const json& j, const std::string& where, Eigen::Index rows, Eigen::Index cols) {
  if (j.is_number()) {
    if (rows != 1 || cols != 1) fail(where, "a scalar is only allowed for 1 x 1 matrices");
    return MatrixXd::Constant(1, 1, number(j, where));
  }
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    fail(where, "expected " + std::to_string(rows) + " rows");
  MatrixXd m(rows, cols);
  for (Eigen::Index a = 0; a < rows; ++a) {
    const json& row = j[a];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(where, "row " + std::to_string(a) + " must have " + std::to_string(cols) + " entries");
    for (Eigen::Index b = 0; b < cols; ++b) m(a, b) = number(row[b], where);
  }
  return m;
}

VectorXd vector(const json& j, const std::string& where, Eigen::Index size) {
  if (j.is_number() && size == 1) return VectorXd::Constant(1, number(j, where));
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    fail(where, "expected a vector of length " + std::to_string(size));
  VectorXd v(size);
  for (Eigen::Index a = 0; a < size; ++a) v(a) = number(j[a], where);
  return v;
}

// Linear resampling of node values given on a uniform grid over [-h, 0].
template <class T>
std::vector<T> resample_nodes(const std::vector<T>& src, const ThetaGrid& target) {
  const int m = static_cast<int>(src.size()) - 1;
  std::vector<T> out;
  out.reserve(target.size());
  for (int i = 0; i < target.size(); ++i) {
    const double s = (target.node(i) + target.h()) / target.h() * m;
    const int k = std::min(m - 1, static_cast<int>(std::floor(s)));
    const double c = s - k;
    out.push_back(c < 1e-12 ? src[k] : (1.0 - c) * src[k] + c * src[k + 1]);
  }
  return out;
}

MatrixFunction matrix_function(const json& j, const std::string& where, const ThetaGrid& grid,
                               Eigen::Index rows, Eigen::Index cols) {
  check_keys(j, {"kind", "value", "samples"}, where);
  const json& kind = need(j, "kind", where);
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "zero") return MatrixFunction::zero(grid, rows, cols);
  if (k == "constant")
    return MatrixFunction::constant(grid, matrix(need(j, "value", where), where + ".value", rows, cols));
  if (k == "samples") {
    const json& s = need(j, "samples", where);
    if (!s.is_array() || s.size() < 2) fail(where + ".samples", "expected at least two nodes");
    std::vector<MatrixXd> nodes;
    for (size_t i = 0; i < s.size(); ++i)
      nodes.push_back(matrix(s[i], where + ".samples[" + std::to_string(i) + "]", rows, cols));
    return MatrixFunction(grid, resample_nodes(nodes, grid));
  }
  fail(where + ".kind", "expected zero, constant or samples, got '" + k + "'");
}

History history(const json& j, const std::string& where, const ThetaGrid& grid, Eigen::Index n) {
  check_keys(j, {"kind", "value", "samples"}, where);
  const json& kind = need(j, "kind", where);
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "constant") return History::constant(grid, vector(need(j, "value", where), where + ".value", n));
  if (k == "samples") {
    const json& s = need(j, "samples", where);
    if (!s.is_array() || s.size() < 2) fail(where + ".samples", "expected at least two nodes");
    std::vector<VectorXd> nodes;
    for (size_t i = 0; i < s.size(); ++i)
      nodes.push_back(vector(s[i], where + ".samples[" + std::to_string(i) + "]", n));
    return History(grid, resample_nodes(nodes, grid));
  }
  fail(where + ".kind", "expected constant or samples, got '" + k + "'");
}

BoundInputs bound_intermediates(const json& j, const BoundsConfig& cfg, const std::string& w) {
  check_keys(j, {"h", "norm_A0", "norm_A1", "g", "L", "C2", "lambda_min_Q", "phi0_norm",
                 "phi_integral"},
             w);
  BoundInputs in;
  in.h = number(need(j, "h", w), w + ".h");
  in.norm_A0 = number_or(j, "norm_A0", 0.0, w);
  in.norm_A1 = number(need(j, "norm_A1", w), w + ".norm_A1");
  in.g = number(need(j, "g", w), w + ".g");
  in.L = number(need(j, "L", w), w + ".L");
  in.C2 = number(need(j, "C2", w), w + ".C2");
  in.lambda_min_Q = number(need(j, "lambda_min_Q", w), w + ".lambda_min_Q");
  in.phi0_norm = number(need(j, "phi0_norm", w), w + ".phi0_norm");
  if (j.contains("phi_integral")) in.phi_integral = number(j.at("phi_integral"), w + ".phi_integral");
  in.alpha = cfg.alpha;
  in.t_star = cfg.t_star;
  return in;
}

BenchmarkConfig benchmark(const json& j, const ScenarioOverrides& ov) {
  const std::string w = "benchmark";
  check_keys(j, {"plant", "reference", "pi", "optimal", "tracking"}, w);
  BenchmarkConfig b;
  if (j.contains("plant")) {
    const json& p = j.at("plant");
    check_keys(p, {"a0", "a1", "b", "h", "input_delay", "u_min", "u_max", "ambient"}, w + ".plant");
    b.plant.a0 = number_or(p, "a0", b.plant.a0, w + ".plant");
    b.plant.a1 = number_or(p, "a1", b.plant.a1, w + ".plant");
    b.plant.b = number_or(p, "b", b.plant.b, w + ".plant");
    b.plant.h = number_or(p, "h", b.plant.h, w + ".plant");
    b.plant.input_delay = number_or(p, "input_delay", b.plant.input_delay, w + ".plant");
    b.plant.u_min = number_or(p, "u_min", b.plant.u_min, w + ".plant");
    b.plant.u_max = number_or(p, "u_max", b.plant.u_max, w + ".plant");
    b.plant.ambient = number_or(p, "ambient", b.plant.ambient, w + ".plant");
  }
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    const std::string wr = w + ".reference";
    check_keys(r, {"kind", "r01", "r02", "r1", "r0", "constant"}, wr);
    if (r.contains("kind")) {
      const std::string k = r.at("kind").is_string() ? r.at("kind").get<std::string>() : "";
      if (k == "piecewise") b.reference.kind = ReferenceProfile::Kind::kPiecewise;
      else if (k == "continuous") b.reference.kind = ReferenceProfile::Kind::kContinuous;
      else if (k == "constant") b.reference.kind = ReferenceProfile::Kind::kConstant;
      else fail(wr + ".kind", "expected piecewise, continuous or constant");
    }
    b.reference.r01 = number_or(r, "r01", b.reference.r01, wr);
    b.reference.r02 = number_or(r, "r02", b.reference.r02, wr);
    b.reference.r1 = number_or(r, "r1", b.reference.r1, wr);
    b.reference.r0 = number_or(r, "r0", b.reference.r0, wr);
    b.reference.constant = number_or(r, "constant", b.reference.constant, wr);
  }
  if (j.contains("pi")) {
    const json& p = j.at("pi");
    check_keys(p, {"Kp", "Ki"}, w + ".pi");
    b.pi.Kp = number_or(p, "Kp", b.pi.Kp, w + ".pi");
    b.pi.Ki = number_or(p, "Ki", b.pi.Ki, w + ".pi");
  }
  if (j.contains("optimal")) {
    const json& o = j.at("optimal");
    const std::string wo = w + ".optimal";
    check_keys(o, {"Q", "R", "input_scale", "n_theta", "dt", "max_horizon", "tol", "max_iter"}, wo);
    b.design.Q = number_or(o, "Q", b.design.Q, wo);
    b.design.R = number_or(o, "R", b.design.R, wo);
    b.design.input_scale = number_or(o, "input_scale", b.design.input_scale, wo);
    if (o.contains("n_theta")) b.design.n_theta = integer(o.at("n_theta"), wo + ".n_theta");
    b.design.dt = number_or(o, "dt", b.design.dt, wo);
    b.design.max_horizon = number_or(o, "max_horizon", b.design.max_horizon, wo);
    b.design.tol = number_or(o, "tol", b.design.tol, wo);
    if (o.contains("max_iter")) b.design.max_iter = integer(o.at("max_iter"), wo + ".max_iter");
  }
  if (j.contains("tracking")) {
    const json& t = j.at("tracking");
    check_keys(t, {"dt", "horizon", "r_load"}, w + ".tracking");
    b.tracking.dt = number_or(t, "dt", b.tracking.dt, w + ".tracking");
    b.tracking.horizon = number_or(t, "horizon", b.tracking.horizon, w + ".tracking");
    b.tracking.r_load = number_or(t, "r_load", b.tracking.r_load, w + ".tracking");
  }
  if (ov.dt) b.tracking.dt = b.design.dt = *ov.dt;
  if (ov.horizon) b.tracking.horizon = *ov.horizon;
  if (ov.n_theta) b.design.n_theta = *ov.n_theta;
  if (ov.tol) b.design.tol = *ov.tol;
  if (ov.max_iter) b.design.max_iter = *ov.max_iter;
  if (ov.continuous_ref) b.reference.kind = ReferenceProfile::Kind::kContinuous;
  b.plant.validate();
  if (!(b.tracking.dt > 0.0) || b.tracking.dt > 0.5 + 1e-12)
    fail(w + ".tracking.dt", "must lie in (0, 0.5]");
  if (!(b.tracking.r_load > 0.0)) fail(w + ".tracking.r_load", "must be positive");
  return b;
}

Scenario build(const json& root, const ScenarioOverrides& ov) {
  check_keys(root, {"schema_version", "name", "n", "r", "A", "B", "D", "h", "E", "Q", "R", "law",
                    "grid", "history", "lyapunov_weight", "bounds", "synthesis", "benchmark"},
             "root");
  const json& version = need(root, "schema_version", "root");
  if (integer(version, "schema_version") != Scenario::kSchemaVersion)
    fail("schema_version", "unsupported version " + version.dump());
  std::string name = "scenario";
  if (root.contains("name")) {
    if (!root.at("name").is_string()) fail("name", "expected a string");
    name = root.at("name").get<std::string>();
  }
  const int n = integer(need(root, "n", "root"), "n");
  const int r = integer(need(root, "r", "root"), "r");
  if (n < 1 || r < 1 || r > n) fail("root", "need n >= 1 and 1 <= r <= n");
  const double h = number(need(root, "h", "root"), "h");
  if (!(h > 0.0)) fail("h", "delay must be positive");

  int n_theta = ThetaGrid::kDefaultIntervals;
  double dt = 0.0, horizon = 10.0 * h, max_horizon = 0.0;
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    check_keys(g, {"n_theta", "dt", "horizon", "max_horizon"}, "grid");
    if (g.contains("n_theta")) n_theta = integer(g.at("n_theta"), "grid.n_theta");
    dt = number_or(g, "dt", dt, "grid");
    horizon = number_or(g, "horizon", horizon, "grid");
    max_horizon = number_or(g, "max_horizon", max_horizon, "grid");
  }
  if (ov.n_theta) n_theta = *ov.n_theta;
  if (ov.dt) dt = *ov.dt;
  if (ov.horizon) horizon = *ov.horizon;
  if (n_theta < 1) fail("grid.n_theta", "must be at least 1");
  if (dt == 0.0) {
    const int per_cell = std::max(1, static_cast<int>(std::ceil(128.0 / n_theta)));
    dt = h / (n_theta * per_cell);
  }
  if (!(horizon >= 0.0)) fail("grid.horizon", "must be non-negative");
  const ThetaGrid grid(h, n_theta);
  steps_per_theta_cell(grid, dt);  // throws GridError on misalignment

  const MatrixXd A = matrix(need(root, "A", "root"), "A", n, n);
  const MatrixXd B = matrix(need(root, "B", "root"), "B", n, n);
  const MatrixXd D = matrix(need(root, "D", "root"), "D", n, r);
  const MatrixFunction E = root.contains("E") ? matrix_function(root.at("E"), "E", grid, n, n)
                                              : MatrixFunction::zero(grid, n, n);
  SystemModel system(A, B, D, h, E);
  CostWeights weights(matrix(need(root, "Q", "root"), "Q", n, n),
                      matrix(need(root, "R", "root"), "R", r, r));

  ControlLaw law = ControlLaw::zero(system);
  if (root.contains("law")) {
    const json& l = root.at("law");
    check_keys(l, {"Gamma0", "Gamma1"}, "law");
    const MatrixXd g0 = l.contains("Gamma0") ? matrix(l.at("Gamma0"), "law.Gamma0", r, n)
                                             : MatrixXd::Zero(r, n);
    const MatrixFunction g1 = l.contains("Gamma1")
                                  ? matrix_function(l.at("Gamma1"), "law.Gamma1", grid, r, n)
                                  : MatrixFunction::zero(grid, r, n);
    law = ControlLaw(g0, g1);
  }

  History phi = root.contains("history") ? history(root.at("history"), "history", grid, n)
                                         : History::constant(grid, VectorXd::Ones(n));
  const MatrixXd M = root.contains("lyapunov_weight")
                         ? matrix(root.at("lyapunov_weight"), "lyapunov_weight", n, n)
                         : weights.Q();

  BoundsConfig bcfg;
  bcfg.alpha = phi.sup_norm() > 0.0 ? phi.sup_norm() : 1.0;
  if (root.contains("bounds")) {
    const json& b = root.at("bounds");
    check_keys(b, {"alpha", "t_star", "intermediates"}, "bounds");
    bcfg.alpha = number_or(b, "alpha", bcfg.alpha, "bounds");
    bcfg.t_star = number_or(b, "t_star", bcfg.t_star, "bounds");
    if (!(bcfg.alpha > 0.0)) fail("bounds.alpha", "must be positive");
    if (!(bcfg.t_star > 0.0)) fail("bounds.t_star", "must be positive");
    if (b.contains("intermediates"))
      bcfg.intermediates = bound_intermediates(b.at("intermediates"), bcfg, "bounds.intermediates");
  }

  SynthesisOptions so;
  so.dt = dt;
  so.max_horizon = max_horizon;
  if (root.contains("synthesis")) {
    const json& s = root.at("synthesis");
    check_keys(s, {"tol", "max_iter", "max_halvings", "probe"}, "synthesis");
    so.tol = number_or(s, "tol", so.tol, "synthesis");
    if (s.contains("max_iter")) so.max_iter = integer(s.at("max_iter"), "synthesis.max_iter");
    if (s.contains("max_halvings"))
      so.max_halvings = integer(s.at("max_halvings"), "synthesis.max_halvings");
    if (s.contains("probe")) so.probe = history(s.at("probe"), "synthesis.probe", grid, n);
  }
  if (ov.tol) so.tol = *ov.tol;
  if (ov.max_iter) so.max_iter = *ov.max_iter;
  if (!(so.tol > 0.0)) fail("synthesis.tol", "must be positive");
  if (so.max_iter < 1) fail("synthesis.max_iter", "must be at least 1");

  std::optional<BenchmarkConfig> bench;
  if (root.contains("benchmark")) bench = benchmark(root.at("benchmark"), ov);

  return Scenario{name, std::move(system), std::move(weights), std::move(law), dt, horizon,
                  max_horizon, std::move(phi), M, bcfg, so, bench};
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const ScenarioOverrides& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    return build(root, overrides);
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario schema error: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

}  // namespace tdopt
