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
#ifndef TDOPT_LINALG_HPP
#define TDOPT_LINALG_HPP

#include <Eigen/Dense>

namespace tdopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Largest singular value. Every matrix norm in the library is this one.
inline double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

/// Smallest eigenvalue of the symmetric part of `m`.
inline double min_symmetric_eigenvalue(const MatrixXd& m) {
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline bool same_shape(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

}  // namespace tdopt

#endif  // TDOPT_LINALG_HPP
