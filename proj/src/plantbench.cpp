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
#include "tdopt/plantbench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

void PlantModel::validate() const {
  if (!(h > 0.0)) throw InputError("plant delay must be positive");
  if (!(u_min < u_max)) throw InputError("saturation limits must satisfy u_min < u_max");
  if (!(input_delay >= 0.0)) throw InputError("input delay must be non-negative");
  if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(b) || !std::isfinite(ambient))
    throw InputError("plant parameters must be finite");
}

double ReferenceProfile::at(double t) const {
  t = std::max(t, 0.0);
  switch (kind) {
    case Kind::kConstant: return constant;
    case Kind::kPiecewise:
      if (t < 40.0) return t / 10.0 + r01;
      if (t < 600.0) return r1;
      if (t < 640.0) return r1 - (t - 600.0) / 10.0;
      if (t < 1240.0) return r0;
      if (t < 1280.0) return (t - 1240.0) / 10.0 + r02;
      return r1;
    case Kind::kContinuous:
      if (t < 40.0) return r01 + (r1 - r01) * t / 40.0;
      if (t < 600.0) return r1;
      if (t < 640.0) return r1 + (r0 - r1) * (t - 600.0) / 40.0;
      if (t < 1240.0) return r0;
      if (t < 1280.0) return r0 + (r1 - r0) * (t - 1240.0) / 40.0;
      return r1;
  }
  return constant;
}

double ReferenceProfile::slope(double t) const {
  if (t < 0.0 || kind == Kind::kConstant) return 0.0;
  const bool ramp = t < 40.0 || (t >= 600.0 && t < 640.0) || (t >= 1240.0 && t < 1280.0);
  if (!ramp) return 0.0;
  if (kind == Kind::kPiecewise) return t >= 600.0 && t < 640.0 ? -0.1 : 0.1;
  if (t < 40.0) return (r1 - r01) / 40.0;
  if (t < 640.0) return (r0 - r1) / 40.0;
  return (r1 - r0) / 40.0;
}

std::string controller_name(const Controller& c) {
  if (std::holds_alternative<PiController>(c)) return "pi";
  if (std::holds_alternative<OptimalController>(c)) return "optimal";
  return "none";
}

namespace {

// Stateful input computation for one controller.
class InputLaw {
 public:
  InputLaw(const PlantModel& p, const ReferenceProfile& ref, const Controller& c, double dt,
           int H)
      : plant_(p), ref_(ref), controller_(c), dt_(dt), H_(H) {
    if (const auto* opt = std::get_if<OptimalController>(&controller_)) {
      if (opt->law.gamma0().size() != 1) throw DimensionError("plant feedback must be scalar");
      if (std::abs(opt->law.gamma1().grid().h() - p.h) > 1e-12 * p.h)
        throw GridError("feedback grid does not span the plant delay");
      for (const MatrixXd& g : resample(opt->law.gamma1(), dt)) g1_.push_back(g(0, 0));
    }
  }

  // y[k + H] holds the temperature rise at t_k.
  double operator()(int j, const std::vector<double>& y) {
    const double t = j * dt_;
    const double e = ref_.at(t) - (y[j + H_] + plant_.ambient);
    if (const auto* off = std::get_if<NoControl>(&controller_)) return clamp(off->u);
    if (const auto* pi = std::get_if<PiController>(&controller_)) {
      const double v = pi->Kp * e + pi->Ki * integral_;
      const double u = clamp(v);
      // Conditional integration: freeze while saturated unless the error unwinds it.
      if (v == u || (v > plant_.u_max && e < 0.0) || (v < plant_.u_min && e > 0.0))
        integral_ += e * dt_;
      return u;
    }
    const auto& opt = std::get<OptimalController>(controller_);
    const auto rise_ref = [&](double s) { return ref_.at(s) - plant_.ambient; };
    const auto z = [&](int k) { return y[k + H_] - (k < 0 ? rise_ref(0.0) : rise_ref(k * dt_)); };
    double v = opt.law.gamma0()(0, 0) * z(j);
    double acc = 0.0;
    for (int l = 0; l <= H_; ++l) acc += (l == 0 || l == H_ ? 0.5 : 1.0) * g1_[l] * z(j - H_ + l);
    v += dt_ * acc;
    const double ff =
        (ref_.slope(t) - plant_.a0 * rise_ref(t) - plant_.a1 * rise_ref(t - plant_.h)) / plant_.b;
    return clamp(ff + opt.input_scale * v);
  }

 private:
  double clamp(double u) const { return std::clamp(u, plant_.u_min, plant_.u_max); }

  const PlantModel& plant_;
  const ReferenceProfile& ref_;
  const Controller& controller_;
  double dt_;
  int H_;
  double integral_ = 0.0;
  std::vector<double> g1_;
};

}  // namespace

TrackingResult run_tracking(const PlantModel& plant, const ReferenceProfile& ref,
                            const Controller& controller, const TrackingConfig& config) {
  plant.validate();
  const double dt = config.dt;
  const int H = steps_per_delay(plant.h, dt);
  int input_lag = 0;
  if (plant.input_delay > 0.0) input_lag = steps_per_delay(plant.input_delay, dt);
  const int J = static_cast<int>(std::ceil(config.horizon / dt - 1e-9));
  if (J < 1) throw InputError("tracking horizon must cover at least one step");

  std::vector<double> y(H + J + 1, 0.0);
  std::vector<double> commands;
  commands.reserve(J + 1);
  InputLaw law(plant, ref, controller, dt, H);
  TrackingResult out;
  out.controller = controller_name(controller);
  out.rows.reserve(J + 1);
  const auto f = [&](double yv, double yd, double u) { return plant.a0 * yv + plant.a1 * yd + plant.b * u; };

  for (int j = 0; j <= J; ++j) {
    const double u_cmd = law(j, y);
    commands.push_back(u_cmd);
    const double t = j * dt;
    const double setpoint = ref.at(t);
    const double temp = y[j + H] + plant.ambient;
    out.rows.push_back({t, setpoint, temp, u_cmd, std::abs(setpoint - temp)});
    if (j == J) break;
    const double u = j - input_lag >= 0 ? commands[j - input_lag] : 0.0;
    const double y0 = y[j + H];
    const double d0 = y[j], d1 = y[j + 1], dm = 0.5 * (d0 + d1);
    const double k1 = f(y0, d0, u);
    const double k2 = f(y0 + 0.5 * dt * k1, dm, u);
    const double k3 = f(y0 + 0.5 * dt * k2, dm, u);
    const double k4 = f(y0 + dt * k3, d1, u);
    const double next = y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next)) {
      std::ostringstream os;
      os << "plant simulation diverged at t=" << (j + 1) * dt;
      throw DivergenceError((j + 1) * dt, os.str());
    }
    y[j + 1 + H] = next;
  }

  out.u_low = out.u_high = out.rows.front().u;
  for (int j = 0; j <= J; ++j) {
    const double w = (j == 0 || j == J) ? 0.5 * dt : dt;
    const TrackingRow& r = out.rows[j];
    out.iae += w * r.abs_error;
    out.energy_wh += w * r.u * r.u / config.r_load / 3600.0;
    out.u_low = std::min(out.u_low, r.u);
    out.u_high = std::max(out.u_high, r.u);
  }
  return out;
}

void write_tracking_csv(std::ostream& os, const TrackingResult& r) {
  os << "t,setpoint,temperature,u,abs_error\n" << std::setprecision(10);
  for (const TrackingRow& row : r.rows)
    os << row.t << ',' << row.setpoint << ',' << row.temperature << ',' << row.u << ','
       << row.abs_error << '\n';
}

OptimalDesign design_optimal_controller(const PlantModel& plant,
                                        const OptimalDesignOptions& options) {
  plant.validate();
  if (plant.input_delay != 0.0)
    throw InputError("optimal design covers state delay only; set input_delay to 0");
  if (!(options.input_scale > 0.0)) throw InputError("input scale must be positive");
  const MatrixXd A = MatrixXd::Constant(1, 1, plant.a0);
  const MatrixXd B = MatrixXd::Constant(1, 1, plant.a1);
  const MatrixXd D = MatrixXd::Constant(1, 1, plant.b * options.input_scale);
  const SystemModel sys = SystemModel::without_distributed(A, B, D, plant.h, options.n_theta);
  const CostWeights w(MatrixXd::Constant(1, 1, options.Q), MatrixXd::Constant(1, 1, options.R));
  SynthesisOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  so.dt = options.dt;
  so.max_horizon = options.max_horizon;
  SynthesisResult res = policy_iteration(sys, w, ControlLaw::zero(sys), so);
  OptimalController ctl{res.law, options.input_scale};
  return OptimalDesign{std::move(ctl), std::move(res)};
}

}  // namespace tdopt
