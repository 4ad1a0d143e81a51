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
#ifndef TDOPT_SYNTHESIS_HPP
#define TDOPT_SYNTHESIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tdopt/bellman.hpp"

namespace tdopt {

/**
 * Defects of the optimality system at the grid nodes:
 *   r1  A^T P0 + P0 A - P0 S P0 + P1(0)^T + P1(0) + Q
 *   r2  P1' - (A^T - P0 S) P1 - P2(0, .) - P0 E
 *   r3  (d_xi + d_theta) P2 + P1^T(xi) S P1(theta) - E^T(xi) P1(theta) - P1^T(xi) E(theta)
 *   r4  P1(-h) - P0 B
 *   r5  P2(-h, .) - B^T P1
 * with S = D R^-1 D^T. r4 and r5 hold for every stabilizing law; r1..r3 only
 * at the optimum.
 */
struct RiccatiResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;
  double r5 = 0.0;

  double max() const;
};

/// G0 = -R^-1 D^T P0, G1(theta) = -R^-1 D^T P1(theta).
ControlLaw improved_law(const BellmanKernels& k, const SystemModel& sys, const CostWeights& w);

RiccatiResiduals riccati_residuals(const BellmanKernels& k, const SystemModel& sys,
                                   const CostWeights& w);

enum class SynthesisStatus { kConverged, kMaxIterations, kDestabilized };

const char* to_string(SynthesisStatus s);

struct SynthesisOptions {
  double tol = 1e-5;
  int max_iter = 50;
  double dt = 0.0;           ///< 0 selects h/128
  double max_horizon = 0.0;  ///< fundamental-matrix growth cap; 0 selects 200 h
  int max_halvings = 5;      ///< damped steps tried when an update destabilizes
  std::optional<History> probe;  ///< defaults to phi = 1 componentwise
};

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;         ///< V(probe) for the law of this iteration
  RiccatiResiduals residuals;
  DecayFit fit;
  double law_change = 0.0;   ///< distance from this law to its improvement
  double step = 1.0;         ///< fraction of the improvement actually taken
  double gamma0_norm = 0.0;
};

struct SynthesisResult {
  ControlLaw law;
  BellmanKernels kernels;
  std::vector<IterationRecord> trace;
  SynthesisStatus status = SynthesisStatus::kMaxIterations;
  double min_R_eigenvalue = 0.0;  ///< second-order condition, must be > 0
  std::string message;
};

/// Evaluate / improve until the law changes by less than tol. Throws
/// InstabilityError when the initial law is not stabilizing.
SynthesisResult policy_iteration(const SystemModel& sys, const CostWeights& w,
                                 const ControlLaw& init, const SynthesisOptions& options = {});

}  // namespace tdopt

#endif  // TDOPT_SYNTHESIS_HPP
