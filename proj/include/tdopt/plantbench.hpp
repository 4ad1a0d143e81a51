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
#ifndef TDOPT_PLANTBENCH_HPP
#define TDOPT_PLANTBENCH_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tdopt/synthesis.hpp"

namespace tdopt {

/**
 * Scalar heater  y' = a0 y + a1 y(t-h) + b u(t - input_delay)  where y is the
 * temperature rise over `ambient`; the input is clamped to [u_min, u_max].
 */
struct PlantModel {
  double a0 = -0.046502;
  double a1 = 0.044844;
  double b = 0.000143;
  double h = 4.0;
  double input_delay = 0.0;
  double u_min = 0.0;
  double u_max = 120.0;
  double ambient = 17.0;

  void validate() const;
  /// Temperature rise at constant input u (requires a0 + a1 < 0).
  double steady_state_rise(double u) const { return -b * u / (a0 + a1); }
};

/// Tracking setpoint in degrees C.
struct ReferenceProfile {
  enum class Kind { kPiecewise, kContinuous, kConstant };
  Kind kind = Kind::kPiecewise;
  double r01 = 17.0;   ///< initial temperature
  double r02 = 18.5;   ///< start of the last ramp
  double r1 = 25.0;    ///< upper plateau
  double r0 = 21.0;    ///< middle plateau
  double constant = 17.0;

  double at(double t) const;
  /// Piecewise slope, zero at jumps.
  double slope(double t) const;
};

struct PiController {
  double Kp = 79.51;
  double Ki = 3.873;
};

/// Model-inverting feedforward plus the synthesized feedback on the error.
struct OptimalController {
  ControlLaw law;
  double input_scale = 120.0;  ///< volts per unit of the synthesized input
};

struct NoControl {
  double u = 0.0;  ///< constant input
};

using Controller = std::variant<NoControl, PiController, OptimalController>;

std::string controller_name(const Controller& c);

struct TrackingConfig {
  double dt = 0.5;
  double horizon = 1800.0;
  double r_load = 240.0;  ///< heater resistance for the energy figure, ohms
};

struct TrackingRow {
  double t, setpoint, temperature, u, abs_error;
};

struct TrackingResult {
  std::string controller;
  std::vector<TrackingRow> rows;
  double iae = 0.0;        ///< int |r - x| dt
  double energy_wh = 0.0;  ///< int u^2 / r_load dt, in watt-hours
  double u_low = 0.0;      ///< smallest applied input
  double u_high = 0.0;     ///< largest applied input
};

/// Fixed-step simulation with zero-order-hold input; history at ambient.
TrackingResult run_tracking(const PlantModel& plant, const ReferenceProfile& ref,
                            const Controller& controller, const TrackingConfig& config);

void write_tracking_csv(std::ostream& os, const TrackingResult& r);

struct OptimalDesignOptions {
  double Q = 15.0;
  double R = 1.0;
  double input_scale = 120.0;
  int n_theta = 8;
  double dt = 0.5;
  double max_horizon = 20000.0;
  double tol = 1e-5;
  int max_iter = 30;
};

struct OptimalDesign {
  OptimalController controller;
  SynthesisResult synthesis;
};

/// Policy iteration on the plant from the zero law (the open loop is stable).
OptimalDesign design_optimal_controller(const PlantModel& plant,
                                        const OptimalDesignOptions& options);

/// Published hardware figures, printed for context only.
struct PublishedTable {
  static constexpr double kOptimalIae = 1458.9;
  static constexpr double kPiIae = 1683.13;
  static constexpr double kOptimalEnergyWh = 21.18;
  static constexpr double kPiEnergyWh = 26.07;
};

}  // namespace tdopt

#endif  // TDOPT_PLANTBENCH_HPP
