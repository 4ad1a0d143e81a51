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
#include "tdopt/bounds.hpp"

#include <cmath>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

UpperBound upper_bound(const BellmanKernels& k) {
  const std::vector<double> w = k.grid().trapezoid_weights();
  const int m = k.grid().size();
  UpperBound ub;
  ub.pi0_norm = spectral_norm(k.pi0());
  for (int a = 0; a < m; ++a) {
    ub.X1 += w[a] * spectral_norm(k.pi1().node(a));
    for (int b = 0; b < m; ++b) ub.X2 += w[a] * w[b] * spectral_norm(k.pi2(a, b));
  }
  ub.C1 = ub.pi0_norm + 2.0 * ub.X1 + ub.X2;
  return ub;
}

BoundInputs bound_inputs(const ClosedLoopSystem& cl, const MatrixXd& Q, double alpha,
                         double t_star, double phi0_norm) {
  BoundInputs in;
  in.h = cl.h();
  in.norm_A0 = spectral_norm(cl.A0());
  in.norm_A1 = spectral_norm(cl.A1());
  in.g = sup_norm_G(cl);
  const std::vector<double> w = cl.grid().trapezoid_weights();
  double integral = 0.0;
  for (int i = 0; i < cl.grid().size(); ++i) integral += w[i] * spectral_norm(cl.G().node(i));
  in.L = in.norm_A0 + in.norm_A1 + in.g * in.h;
  in.C2 = in.norm_A0 + in.norm_A1 + integral;
  in.alpha = alpha;
  in.t_star = t_star;
  in.lambda_min_Q = min_symmetric_eigenvalue(Q);
  in.phi0_norm = phi0_norm;
  return in;
}

BoundsReport lower_bound_pipeline(const BoundInputs& in) {
  if (!(in.alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(in.t_star > 0.0)) throw InputError("t* must be positive");
  if (!(in.h > 0.0)) throw InputError("delay must be positive");
  if (in.norm_A0 < 0 || in.norm_A1 < 0 || in.g < 0 || in.L < 0 || in.C2 < 0 ||
      in.phi0_norm < 0)
    throw InputError("bound inputs must be non-negative");
  BoundsReport r;
  r.inputs = in;
  const double h = in.h;
  const double phi_integral = in.phi_integral.value_or(in.alpha * h);
  r.m0 = in.phi0_norm + (in.norm_A1 + in.g * h) * phi_integral;
  r.m0_limit = in.alpha * (1.0 + (in.norm_A1 + in.g * h) * h);
  r.N_t_star = in.alpha * (1.0 + in.norm_A1 * h + in.g * h * h) * std::exp(in.L * in.t_star);
  r.N_bar = std::max(in.C2 * in.L * r.N_t_star, in.alpha / (2.0 * in.t_star));
  r.delta = in.phi0_norm / (2.0 * r.N_bar);
  r.cubic_coefficient = in.lambda_min_Q / (8.0 * r.N_bar);

  const auto warn = [&](const std::string& s) { r.warnings.push_back(s); };
  if (r.delta > in.t_star) {
    std::ostringstream os;
    os << "delta=" << r.delta << " exceeds t*=" << in.t_star
       << "; the cubic lower bound is not justified for this alpha and t*";
    warn(os.str());
  }
  if (!(r.N_t_star > in.alpha)) warn("N(t*) does not exceed alpha");
  if (in.phi0_norm > in.alpha * (1.0 + 1e-12)) warn("||phi(0)|| exceeds alpha");
  if (r.m0 > r.m0_limit * (1.0 + 1e-12)) warn("m0 exceeds alpha (1 + (||A1|| + g h) h)");
  if (in.C2 > in.L * (1.0 + 1e-9))
    warn("C2 exceeds L although int ||G|| <= g h; the two constants look swapped");
  if (!(in.lambda_min_Q > 0.0)) warn("lambda_min(Q) is not positive");
  return r;
}

VelocityCheck velocity_bound_check(const ClosedLoopSystem& cl,
                                   const std::vector<Trajectory>& trajectories, double tol) {
  VelocityCheck out;
  out.C2 = bound_inputs(cl, MatrixXd::Identity(cl.n(), cl.n()), 1.0, 1.0, 0.0).C2;
  out.tol = tol;
  for (const Trajectory& x : trajectories) {
    const double dt = x.dt();
    for (int j = 1; j < x.last_index(); ++j) {
      const double window = x.window_sup_norm(j);
      if (!(window > 0.0)) continue;
      const double speed = (x.sample(j + 1) - x.sample(j - 1)).norm() / (2.0 * dt);
      out.max_ratio = std::max(out.max_ratio, speed / window);
    }
  }
  out.holds = out.max_ratio <= out.C2 * (1.0 + tol);
  return out;
}

}  // namespace tdopt
