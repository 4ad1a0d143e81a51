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
#ifndef TDOPT_GRID_HPP
#define TDOPT_GRID_HPP

#include <vector>

#include "tdopt/linalg.hpp"

namespace tdopt {

/// One-sided limit selector for piecewise-continuous samples.
enum class Side { kLeft, kRight };

/**
 * Uniform grid on [-h, 0] with `intervals` cells; node i sits at -h + i*h/N.
 * Every function of the lag variable (E, Gamma1, Pi1, Pi2, histories) is
 * sampled on one of these and linearly interpolated between nodes.
 */
class ThetaGrid {
 public:
  static constexpr int kDefaultIntervals = 64;

  ThetaGrid(double h, int intervals);

  double h() const { return h_; }
  int intervals() const { return intervals_; }
  int size() const { return intervals_ + 1; }
  double step() const { return h_ / intervals_; }
  double node(int i) const;

  /// Cell index and fraction for theta in [-h, 0]; throws outside.
  std::pair<int, double> locate(double theta) const;

  /// Composite trapezoid weights over the nodes.
  std::vector<double> trapezoid_weights() const;

  bool operator==(const ThetaGrid& other) const;

 private:
  double h_;
  int intervals_;
};

/// Matrix-valued function of theta stored as samples on a ThetaGrid.
class MatrixFunction {
 public:
  MatrixFunction(ThetaGrid grid, std::vector<MatrixXd> samples);

  static MatrixFunction constant(const ThetaGrid& grid, const MatrixXd& value);
  static MatrixFunction zero(const ThetaGrid& grid, Eigen::Index rows,
                             Eigen::Index cols);

  const ThetaGrid& grid() const { return grid_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const MatrixXd& node(int i) const { return samples_.at(i); }
  const std::vector<MatrixXd>& samples() const { return samples_; }

  /// Piecewise-linear value at theta in [-h, 0].
  MatrixXd at(double theta) const;

  bool is_zero() const;
  double sup_norm() const;

 private:
  ThetaGrid grid_;
  std::vector<MatrixXd> samples_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
};

/// Number of integration steps per delay; throws GridError unless dt divides h.
int steps_per_delay(double h, double dt);

/// Grid-compatibility check between the theta grid and the time step:
/// theta nodes must land on the time grid. Returns dt-steps per theta cell.
int steps_per_theta_cell(const ThetaGrid& grid, double dt);

}  // namespace tdopt

#endif  // TDOPT_GRID_HPP
