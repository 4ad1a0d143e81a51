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
#include "tdopt/synthesis.hpp"

#include <algorithm>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

double RiccatiResiduals::max() const { return std::max({r1, r2, r3, r4, r5}); }

const char* to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::kConverged: return "converged";
    case SynthesisStatus::kDestabilized: return "destabilized";
    default: return "max_iterations";
  }
}

ControlLaw improved_law(const BellmanKernels& k, const SystemModel& sys, const CostWeights& w) {
  if (k.n() != sys.n()) throw DimensionError("kernels do not match the system");
  if (!(k.grid() == sys.grid())) throw GridError("kernels and system use different grids");
  const MatrixXd gain = -w.R_inverse() * sys.D().transpose();
  std::vector<MatrixXd> g1;
  g1.reserve(k.grid().size());
  for (int i = 0; i < k.grid().size(); ++i) g1.push_back(gain * k.pi1().node(i));
  return ControlLaw(gain * k.pi0(), MatrixFunction(k.grid(), std::move(g1)));
}

namespace {

// Second-order derivative estimate at node i of f on a uniform grid.
MatrixXd derivative(const std::vector<MatrixXd>& f, int i, double step) {
  const int last = static_cast<int>(f.size()) - 1;
  if (i > 0 && i < last) return (f[i + 1] - f[i - 1]) / (2.0 * step);
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * step);
  return (3.0 * f[last] - 4.0 * f[last - 1] + f[last - 2]) / (2.0 * step);
}

}  // namespace

RiccatiResiduals riccati_residuals(const BellmanKernels& k, const SystemModel& sys,
                                   const CostWeights& w) {
  if (k.n() != sys.n()) throw DimensionError("kernels do not match the system");
  if (!(k.grid() == sys.grid())) throw GridError("kernels and system use different grids");
  const ThetaGrid& grid = k.grid();
  const int N = grid.intervals();
  const double step = grid.step();
  if (N < 2) throw GridError("residuals need at least two theta cells");
  const MatrixXd& A = sys.A();
  const MatrixXd& B = sys.B();
  const MatrixXd S = sys.D() * w.R_inverse() * sys.D().transpose();
  const MatrixXd& P0 = k.pi0();
  const MatrixFunction& P1 = k.pi1();
  const MatrixFunction& E = sys.E();

  RiccatiResiduals r;
  r.r1 = spectral_norm(A.transpose() * P0 + P0 * A - P0 * S * P0 + P1.node(N).transpose() +
                       P1.node(N) + w.Q());
  const MatrixXd drift = A.transpose() - P0 * S;
  for (int i = 0; i <= N; ++i) {
    const MatrixXd lhs = derivative(P1.samples(), i, step);
    const MatrixXd rhs = drift * P1.node(i) + k.pi2(N, i) + P0 * E.node(i);
    r.r2 = std::max(r.r2, spectral_norm(lhs - rhs));
  }
  // Directional derivative along the diagonal (1, 1).
  for (int a = 0; a <= N; ++a) {
    for (int b = 0; b <= N; ++b) {
      const int lo = -std::min(a, b);
      const int hi = N - std::max(a, b);
      if (hi - lo < 2) continue;
      std::vector<MatrixXd> line;
      for (int s = lo; s <= hi; ++s) line.push_back(k.pi2(a + s, b + s));
      const MatrixXd d = derivative(line, -lo, step);
      const MatrixXd rhs = -P1.node(a).transpose() * S * P1.node(b) +
                           E.node(a).transpose() * P1.node(b) +
                           P1.node(a).transpose() * E.node(b);
      r.r3 = std::max(r.r3, spectral_norm(d - rhs));
    }
  }
  r.r4 = spectral_norm(P1.node(0) - P0 * B);
  for (int i = 0; i <= N; ++i)
    r.r5 = std::max(r.r5, spectral_norm(k.pi2(0, i) - B.transpose() * P1.node(i)));
  return r;
}

namespace {

struct Evaluation {
  FundamentalMatrix fm;
  StabilityReport stability;
};

Evaluation evaluate_law(const SystemModel& sys, const ControlLaw& law,
                        const FundamentalMatrixOptions& fo) {
  const ClosedLoopSystem cl = close_loop(sys, law);
  FundamentalMatrix fm = fundamental_matrix(cl, fo);
  const StabilityReport st = is_exponentially_stable(fm);
  return Evaluation{std::move(fm), st};
}

}  // namespace

SynthesisResult policy_iteration(const SystemModel& sys, const CostWeights& w,
                                 const ControlLaw& init, const SynthesisOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter < 1)
    throw InputError("synthesis needs tol > 0 and max_iter >= 1");
  const History probe = options.probe.value_or(
      History::constant(sys.grid(), VectorXd::Ones(sys.n())));
  FundamentalMatrixOptions fo;
  fo.dt = options.dt;
  fo.max_horizon = options.max_horizon;

  ControlLaw law = init;
  Evaluation current = evaluate_law(sys, law, fo);
  if (current.stability.verdict != Stability::kStable) {
    std::ostringstream os;
    os << "initial control law is not stabilizing (" << to_string(current.stability.verdict)
       << "): decay fit beta=" << current.stability.fit.beta
       << ", ||K(T)||/||K(0)||=" << current.stability.final_ratio;
    throw InstabilityError(os.str());
  }

  std::vector<IterationRecord> trace;
  SynthesisStatus status = SynthesisStatus::kMaxIterations;
  std::string message;
  std::optional<BellmanKernels> kernels;
  double step = 1.0;
  for (int it = 0; it < options.max_iter; ++it) {
    const ClosedLoopSystem cl = close_loop(sys, law);
    auto basis = std::make_shared<const LyapunovBasis>(current.fm, 2 * current.fm.steps_per_delay());
    kernels = BellmanAssembly(basis, current.fm, cl, w, law).kernels();
    const ControlLaw next = improved_law(*kernels, sys, w);

    IterationRecord rec;
    rec.iteration = it;
    rec.cost = evaluate_functional(*kernels, probe);
    rec.residuals = riccati_residuals(*kernels, sys, w);
    rec.fit = current.stability.fit;
    rec.law_change = law.distance(next);
    rec.step = step;
    rec.gamma0_norm = spectral_norm(law.gamma0());
    trace.push_back(rec);
    if (rec.law_change < options.tol) {
      status = SynthesisStatus::kConverged;
      break;
    }
    if (it + 1 == options.max_iter) break;

    // Take the full improvement, halving toward the current law if it destabilizes.
    step = 1.0;
    ControlLaw candidate = next;
    Evaluation trial = evaluate_law(sys, candidate, fo);
    int halvings = 0;
    while (trial.stability.verdict != Stability::kStable && halvings < options.max_halvings) {
      step *= 0.5;
      ++halvings;
      candidate = law.blend(next, step);
      trial = evaluate_law(sys, candidate, fo);
    }
    if (trial.stability.verdict != Stability::kStable) {
      status = SynthesisStatus::kDestabilized;
      std::ostringstream os;
      os << "iterate " << it + 1 << " stays " << to_string(trial.stability.verdict) << " after "
         << halvings << " damped steps";
      message = os.str();
      break;
    }
    law = std::move(candidate);
    current = std::move(trial);
  }
  SynthesisResult result{law, std::move(*kernels), std::move(trace), status,
                         min_symmetric_eigenvalue(w.R()), message};
  return result;
}

}  // namespace tdopt
