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
#include <memory>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tdopt/errors.hpp"
#include "tdopt/lyapmat.hpp"

namespace tdopt {
namespace {

MatrixXd S(double v) { return MatrixXd::Constant(1, 1, v); }

ClosedLoopSystem scalar_loop(double a, double b, double h) {
  return ClosedLoopSystem::from_parts(S(a), S(b), MatrixFunction::zero(ThetaGrid(h, 8), 1, 1), h);
}

FundamentalMatrix decayed(const ClosedLoopSystem& cl, double dt) {
  FundamentalMatrixOptions o;
  o.dt = dt;
  return fundamental_matrix(cl, o);
}

TEST(LyapunovMatrix, DelayFreeScalarIsExponential) {
  const ClosedLoopSystem cl = scalar_loop(-1.0, 0.0, 1.0);
  // Trapezoid in time: error is about dt^2 / 3 and quarters when dt halves.
  const LyapunovMatrix U = lyapunov_matrix(decayed(cl, 1.0 / 128), S(2.0));
  const LyapunovMatrix F = lyapunov_matrix(decayed(cl, 1.0 / 256), S(2.0));
  for (double tau : {-2.0, -0.5, 0.0, 0.3, 1.0, 2.0}) {
    const double e = std::exp(-std::abs(tau));
    EXPECT_NEAR(U.at(tau)(0, 0), e, 3e-5) << tau;
    EXPECT_GT(std::abs(U.at(tau)(0, 0) - e) / std::abs(F.at(tau)(0, 0) - e), 3.5) << tau;
  }
}

TEST(LyapunovMatrix, ScalarDelayMatchesBoundaryValueSolution) {
  for (auto [a0, a1] : {std::pair{0.0, -0.5}, std::pair{0.2, -1.0}, std::pair{-1.0, 0.5}}) {
    const ClosedLoopSystem cl = scalar_loop(a0, a1, 1.0);
    const LyapunovMatrix U = lyapunov_matrix(decayed(cl, 1.0 / 128), S(1.0));
    for (double tau : {-1.0, -0.25, 0.0, 0.5, 1.0})
      EXPECT_NEAR(U.at(tau)(0, 0), testing::scalar_lyapunov(a0, a1, 1.0, 1.0, tau), 1e-5)
          << a0 << "," << a1 << " tau=" << tau;
  }
}

TEST(LyapunovMatrix, DirectQuadratureAgreesWithBasis) {
  const testing::TestSystem ts = testing::distributed_2x2(8);
  const ClosedLoopSystem cl = close_loop(ts.sys, ts.law);
  const FundamentalMatrix fm = decayed(cl, 1.0 / 64);
  const LyapunovMatrix U = lyapunov_matrix(fm, ts.w.Q());
  for (double tau : {-1.5, -0.25, 0.0, 0.75, 2.0})
    EXPECT_TRUE(U.at(tau).isApprox(lyapunov_matrix(fm, ts.w.Q(), tau), 1e-10)) << tau;
}

TEST(LyapunovMatrix, PropertyResidualsAreSmallOnCoreSystems) {
  for (const testing::TestSystem& ts : testing::core_systems(32)) {
    const ClosedLoopSystem cl = close_loop(ts.sys, ts.law);
    const LyapunovMatrix U = lyapunov_matrix(decayed(cl, ts.sys.h() / 128), ts.w.Q());
    const LyapunovResiduals r = lyap_property_residuals(U, cl);
    EXPECT_LT(r.dyn_res, 1e-3) << ts.name;
    EXPECT_LT(r.sym_res, 1e-3) << ts.name;
    EXPECT_LT(r.jump_res, 1e-3) << ts.name;
  }
}

TEST(LyapunovMatrix, ResidualsShrinkWhenStepHalves) {
  const testing::TestSystem ts = testing::distributed_2x2(16);
  const ClosedLoopSystem cl = close_loop(ts.sys, ts.law);
  const auto res = [&](double dt) {
    return lyap_property_residuals(lyapunov_matrix(decayed(cl, dt), ts.w.Q()), cl);
  };
  const LyapunovResiduals a = res(1.0 / 64), b = res(1.0 / 128);
  EXPECT_GE(a.dyn_res / b.dyn_res, 2.0);
  EXPECT_GE(a.jump_res / b.jump_res, 2.0);
}

TEST(LyapunovMatrix, ZeroWeightGivesExactlyZero) {
  const testing::TestSystem ts = testing::distributed_2x2(8);
  const ClosedLoopSystem cl = close_loop(ts.sys, ts.law);
  const LyapunovMatrix U = lyapunov_matrix(decayed(cl, 1.0 / 64), MatrixXd::Zero(2, 2));
  const LyapunovResiduals r = lyap_property_residuals(U, cl);
  EXPECT_EQ(r.dyn_res, 0.0);
  EXPECT_EQ(r.sym_res, 0.0);
  EXPECT_EQ(r.jump_res, 0.0);
}

TEST(LyapunovMatrix, UnstableLoopIsRejectedWithFit) {
  FundamentalMatrixOptions o;
  o.max_horizon = 40.0;
  const FundamentalMatrix fm = fundamental_matrix(scalar_loop(0.3, 0.0, 1.0), o);
  try {
    lyapunov_matrix(fm, S(1.0));
    FAIL() << "expected instability";
  } catch (const InstabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos) << e.what();
  }
}

TEST(LyapunovMatrix, TailBoundCoversTruncation) {
  const ClosedLoopSystem cl = scalar_loop(-1.0, 0.0, 1.0);
  // Same step, two horizons: the difference is the truncation error alone.
  const LyapunovMatrix U = lyapunov_matrix(fundamental_matrix(cl, 8.0, 1.0 / 64), S(2.0));
  const LyapunovMatrix L = lyapunov_matrix(fundamental_matrix(cl, 16.0, 1.0 / 64), S(2.0));
  const double err = std::abs(U.at(0.0)(0, 0) - L.at(0.0)(0, 0));
  EXPECT_GT(err, 0.0);
  EXPECT_LE(err, U.tail_estimate());
}

TEST(LyapunovMatrix, CsvHasOneRowPerLag) {
  const ClosedLoopSystem cl = scalar_loop(-1.0, 0.0, 1.0);
  const LyapunovMatrix U = lyapunov_matrix(decayed(cl, 0.25), S(1.0));
  std::ostringstream os;
  U.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "tau,U11");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2 * U.span_steps() + 1);
}

}  // namespace
}  // namespace tdopt
