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

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tdopt/bellman.hpp"
#include "tdopt/errors.hpp"

namespace tdopt {
namespace {

MatrixXd S(double v) { return MatrixXd::Constant(1, 1, v); }

double max_norm(const testing::DirectKernels& d) {
  double m = spectral_norm(d.pi0);
  for (const auto& p : d.pi1) m = std::max(m, spectral_norm(p));
  for (const auto& row : d.pi2)
    for (const auto& p : row) m = std::max(m, spectral_norm(p));
  return m;
}

// Largest kernel deviation from the direct time-quadrature oracle, relative to the kernel scale.
double oracle_deviation(const testing::TestSystem& ts, double dt) {
  KernelBuildOptions o;
  o.dt = dt;
  const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law, o);
  const testing::DirectKernels d = testing::direct_kernels(ts.sys, ts.w, ts.law, dt);
  double dev = spectral_norm(k.pi0() - d.pi0);
  for (int i = 0; i < k.grid().size(); ++i) {
    dev = std::max(dev, spectral_norm(k.pi1().node(i) - d.pi1[i]));
    for (int j = 0; j < k.grid().size(); ++j)
      dev = std::max(dev, spectral_norm(k.pi2(i, j) - d.pi2[i][j]));
  }
  return dev / max_norm(d);
}

TEST(WeightKernels, CombineQRAndTheLaw) {
  const testing::TestSystem ts = testing::distributed_2x2(4);
  const WeightKernels wk = weight_kernels(ts.w, ts.law);
  const MatrixXd& G0 = ts.law.gamma0();
  EXPECT_TRUE(wk.M1.isApprox(ts.w.Q() + G0.transpose() * ts.w.R() * G0));
  const MatrixXd G1 = ts.law.gamma1().node(2);
  EXPECT_TRUE(wk.M2.node(2).isApprox(G0.transpose() * ts.w.R() * G1));
  EXPECT_TRUE(wk.m3(1, 3).isApprox(ts.law.gamma1().node(1).transpose() * ts.w.R() *
                                   ts.law.gamma1().node(3)));
}

TEST(BellmanKernels, DelayFreeZeroLawReducesToLyapunovScalar) {
  const testing::TestSystem ts = testing::delay_free_scalar(8);
  const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law);
  EXPECT_NEAR(k.pi0()(0, 0), 0.5, 3e-5);
  for (int i = 0; i < k.grid().size(); ++i) {
    EXPECT_NEAR(k.pi1().node(i)(0, 0), 0.0, 1e-12);
    for (int j = 0; j < k.grid().size(); ++j) EXPECT_NEAR(k.pi2(i, j)(0, 0), 0.0, 1e-12);
  }
}

TEST(BellmanKernels, MatchDirectTimeQuadratureOnPointwiseDelay) {
  EXPECT_LT(oracle_deviation(testing::pointwise_delay_scalar(8), 1.0 / 64), 1e-3);
}

TEST(BellmanKernels, MatchDirectTimeQuadratureWithDistributedFeedback) {
  EXPECT_LT(oracle_deviation(testing::distributed_2x2(8), 1.0 / 64), 1e-3);
}

TEST(BellmanKernels, MatchDirectTimeQuadratureWithScalarDistributedLaw) {
  testing::TestSystem ts = testing::monotone_scalar(8);
  ts.law = ControlLaw(S(-0.6), MatrixFunction::constant(ts.sys.grid(), S(0.3)));
  EXPECT_LT(oracle_deviation(ts, 0.5 / 64), 1e-3);
}

TEST(BellmanKernels, AreNearlySymmetric) {
  const testing::TestSystem ts = testing::distributed_2x2(16);
  const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law);
  EXPECT_LT(spectral_norm(k.pi0() - k.pi0().transpose()), 1e-6 * spectral_norm(k.pi0()));
  EXPECT_LT(k.pi2_asymmetry(), 1e-4);
}

TEST(BellmanKernels, FunctionalMatchesSimulatedCost) {
  std::mt19937 rng(3);
  for (const testing::TestSystem& ts : testing::core_systems(32)) {
    const ClosedLoopSystem cl = close_loop(ts.sys, ts.law);
    const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law);
    for (int trial = 0; trial < 5; ++trial) {
      const History phi = testing::random_history(ts.sys.grid(), ts.sys.n(), 1.0, rng);
      const double V = evaluate_functional(k, phi);
      const SimulatedCost J = simulate_cost(cl, ts.law, ts.w, phi, 40.0 * ts.sys.h(), ts.sys.h() / 128);
      const double Jt = J.value + J.tail_estimate;
      EXPECT_LT(std::abs(V - Jt) / Jt, 1e-2) << ts.name << " trial " << trial;
    }
  }
}

TEST(BellmanKernels, QuadraticFormOfOracleMatchesLibraryFunctional) {
  const testing::TestSystem ts = testing::distributed_2x2(8);
  const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law, KernelBuildOptions{1.0 / 64, 0.0});
  const testing::DirectKernels d = testing::direct_kernels(ts.sys, ts.w, ts.law, 1.0 / 64);
  std::mt19937 rng(5);
  const History phi = testing::random_history(ts.sys.grid(), 2, 1.0, rng);
  const double V = evaluate_functional(k, phi);
  EXPECT_NEAR(V, testing::quadratic_form(d, ts.sys.grid(), phi), 1e-3 * std::abs(V));
}

TEST(BellmanKernels, UnstableLawIsRejected) {
  const testing::TestSystem ts = testing::monotone_scalar(8);
  const ControlLaw bad = ControlLaw::proportional(ts.sys, S(2.0));
  KernelBuildOptions o;
  o.max_horizon = 20.0;
  EXPECT_THROW(bellman_kernels(ts.sys, ts.w, bad, o), InstabilityError);
}

TEST(BellmanKernels, CsvDumpsHaveNodeRows) {
  const testing::TestSystem ts = testing::distributed_2x2(4);
  const BellmanKernels k = bellman_kernels(ts.sys, ts.w, ts.law);
  std::ostringstream a, b;
  k.write_pi1_csv(a);
  k.write_pi2_csv(b);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "theta,P11,P12,P21,P22");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "xi,theta,P11,P12,P21,P22");
  const std::string sa = a.str(), sb = b.str();
  EXPECT_EQ(std::count(sa.begin(), sa.end(), '\n'), 1 + 5);
  EXPECT_EQ(std::count(sb.begin(), sb.end(), '\n'), 1 + 25);
}

}  // namespace
}  // namespace tdopt
