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

#include <chrono>
#include <cmath>
#include <sstream>

#include "tdopt/errors.hpp"
#include "tdopt/plantbench.hpp"

namespace tdopt {
namespace {

TEST(Reference, PiecewiseProfileValues) {
  const ReferenceProfile r;
  EXPECT_DOUBLE_EQ(r.at(0.0), 17.0);
  EXPECT_DOUBLE_EQ(r.at(20.0), 19.0);
  EXPECT_DOUBLE_EQ(r.at(100.0), 25.0);
  EXPECT_DOUBLE_EQ(r.at(620.0), 23.0);
  EXPECT_DOUBLE_EQ(r.at(1000.0), 21.0);
  EXPECT_DOUBLE_EQ(r.at(1260.0), 20.5);
  EXPECT_DOUBLE_EQ(r.at(1300.0), 25.0);
  EXPECT_DOUBLE_EQ(r.slope(10.0), 0.1);
  EXPECT_DOUBLE_EQ(r.slope(610.0), -0.1);
  EXPECT_DOUBLE_EQ(r.slope(700.0), 0.0);
}

TEST(Reference, ContinuousRepairHasNoJumps) {
  ReferenceProfile r;
  r.kind = ReferenceProfile::Kind::kContinuous;
  for (double t : {40.0, 600.0, 640.0, 1240.0, 1280.0})
    EXPECT_NEAR(r.at(t - 1e-9), r.at(t), 1e-6) << t;
  EXPECT_DOUBLE_EQ(r.at(0.0), 17.0);
  EXPECT_DOUBLE_EQ(r.at(300.0), 25.0);
  EXPECT_DOUBLE_EQ(r.at(1000.0), 21.0);
}

TEST(Tracking, EquilibriumGivesZeroError) {
  ReferenceProfile r;
  r.kind = ReferenceProfile::Kind::kConstant;
  r.constant = 17.0;
  const TrackingResult res = run_tracking(PlantModel{}, r, NoControl{0.0}, TrackingConfig{});
  EXPECT_EQ(res.iae, 0.0);
  EXPECT_EQ(res.u_low, res.u_high);
  EXPECT_EQ(res.rows.size(), 3601u);
}

TEST(Tracking, IaeIsTrapezoidOfAbsoluteError) {
  PlantModel p;
  p.b = 0.0;
  ReferenceProfile r;
  r.kind = ReferenceProfile::Kind::kConstant;
  r.constant = 20.0;
  TrackingConfig c;
  c.horizon = 100.0;
  const TrackingResult res = run_tracking(p, r, NoControl{60.0}, c);
  EXPECT_NEAR(res.iae, 300.0, 1e-9);
  EXPECT_NEAR(res.energy_wh, 60.0 * 60.0 / 240.0 * 100.0 / 3600.0, 1e-12);
}

TEST(Tracking, BothControllersRespectSaturationAndOptimalWins) {
  const PlantModel plant;
  const ReferenceProfile ref;
  const auto t0 = std::chrono::steady_clock::now();
  const OptimalDesign design = design_optimal_controller(plant, OptimalDesignOptions{});
  const TrackingResult opt = run_tracking(plant, ref, design.controller, TrackingConfig{});
  const TrackingResult pi = run_tracking(plant, ref, PiController{}, TrackingConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 5.0);
  for (const TrackingResult* r : {&opt, &pi}) {
    EXPECT_EQ(r->rows.size(), 3601u);
    EXPECT_GE(r->u_low, 0.0);
    EXPECT_LE(r->u_high, 120.0);
    EXPECT_GT(r->energy_wh, 0.0);
  }
  EXPECT_EQ(design.synthesis.status, SynthesisStatus::kConverged);
  EXPECT_LE(opt.iae, pi.iae);
}

TEST(Tracking, PiSettlesOnFirstOrderDeadTimeModel) {
  PlantModel p;
  p.a0 = -1.0 / 150.0;
  p.a1 = 0.0;
  p.b = 0.01455 / 150.0;
  p.h = 4.0;
  p.input_delay = 3.0;
  p.u_min = -1e6;
  p.u_max = 1e6;
  ReferenceProfile r;
  r.kind = ReferenceProfile::Kind::kConstant;
  r.constant = 25.0;
  const TrackingResult res = run_tracking(p, r, PiController{}, TrackingConfig{});
  for (const TrackingRow& row : res.rows)
    if (row.t >= 600.0) EXPECT_LE(row.abs_error, 0.5) << "t=" << row.t;
}

TEST(Tracking, RunsAreBitIdentical) {
  const PlantModel plant;
  const TrackingResult a = run_tracking(plant, ReferenceProfile{}, PiController{}, TrackingConfig{});
  const TrackingResult b = run_tracking(plant, ReferenceProfile{}, PiController{}, TrackingConfig{});
  EXPECT_EQ(a.iae, b.iae);
  EXPECT_EQ(a.energy_wh, b.energy_wh);
  std::ostringstream sa, sb;
  write_tracking_csv(sa, a);
  write_tracking_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "t,setpoint,temperature,u,abs_error");
}

TEST(Tracking, RejectsInvalidPlants) {
  PlantModel p;
  p.u_min = 130.0;
  EXPECT_THROW(run_tracking(p, ReferenceProfile{}, PiController{}, TrackingConfig{}), InputError);
  PlantModel q;
  q.input_delay = 3.0;
  EXPECT_THROW(design_optimal_controller(q, OptimalDesignOptions{}), InputError);
}

TEST(PublishedTable, HoldsHardwareFiguresForContext) {
  EXPECT_DOUBLE_EQ(PublishedTable::kOptimalIae, 1458.9);
  EXPECT_DOUBLE_EQ(PublishedTable::kPiIae, 1683.13);
}

}  // namespace
}  // namespace tdopt
