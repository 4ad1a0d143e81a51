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
#include "tdopt/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdopt/errors.hpp"

namespace tdopt {

namespace {

constexpr double kGridSlack = 1e-9;

void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

std::string shape(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- ThetaGrid

ThetaGrid::ThetaGrid(double h, int intervals) : h_(h), intervals_(intervals) {
  if (!(h > 0.0) || !std::isfinite(h)) throw GridError("delay h must be positive");
  if (intervals < 1) throw GridError("theta grid needs at least one interval");
}

double ThetaGrid::node(int i) const {
  if (i == intervals_) return 0.0;
  return -h_ + i * step();
}

std::pair<int, double> ThetaGrid::locate(double theta) const {
  const double slack = kGridSlack * h_;
  if (theta < -h_ - slack || theta > slack) {
    std::ostringstream os;
    os << "theta=" << theta << " outside [-h, 0] with h=" << h_;
    throw NumericalError(os.str());
  }
  double s = (theta + h_) / step();
  s = std::clamp(s, 0.0, static_cast<double>(intervals_));
  int i = static_cast<int>(std::floor(s));
  if (i >= intervals_) i = intervals_ - 1;
  return {i, s - i};
}

std::vector<double> ThetaGrid::trapezoid_weights() const {
  std::vector<double> w(size(), step());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

bool ThetaGrid::operator==(const ThetaGrid& other) const {
  return intervals_ == other.intervals_ && std::abs(h_ - other.h_) <= kGridSlack * h_;
}

// ----------------------------------------------------------- MatrixFunction

MatrixFunction::MatrixFunction(ThetaGrid grid, std::vector<MatrixXd> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.size()) {
    std::ostringstream os;
    os << "matrix function has " << samples_.size() << " samples, grid has "
       << grid_.size() << " nodes";
    throw DimensionError(os.str());
  }
  rows_ = samples_.front().rows();
  cols_ = samples_.front().cols();
  for (const auto& s : samples_) {
    require(s.rows() == rows_ && s.cols() == cols_,
            "matrix function samples differ in shape");
    if (!s.allFinite()) throw InputError("matrix function sample is not finite");
  }
}

MatrixFunction MatrixFunction::constant(const ThetaGrid& grid, const MatrixXd& value) {
  return MatrixFunction(grid, std::vector<MatrixXd>(grid.size(), value));
}

MatrixFunction MatrixFunction::zero(const ThetaGrid& grid, Eigen::Index rows,
                                    Eigen::Index cols) {
  return constant(grid, MatrixXd::Zero(rows, cols));
}

MatrixXd MatrixFunction::at(double theta) const {
  const auto [i, f] = grid_.locate(theta);
  if (f == 0.0) return samples_[i];
  return (1.0 - f) * samples_[i] + f * samples_[i + 1];
}

bool MatrixFunction::is_zero() const {
  return std::all_of(samples_.begin(), samples_.end(),
                     [](const MatrixXd& m) { return m.isZero(0.0); });
}

double MatrixFunction::sup_norm() const {
  double best = 0.0;
  for (const auto& s : samples_) best = std::max(best, spectral_norm(s));
  return best;
}

int steps_per_delay(double h, double dt) {
  if (!(dt > 0.0)) throw GridError("time step must be positive");
  const double ratio = h / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "time step dt=" << dt << " does not divide the delay h=" << h;
    throw GridError(os.str());
  }
  return static_cast<int>(rounded);
}

int steps_per_theta_cell(const ThetaGrid& grid, double dt) {
  const int per_delay = steps_per_delay(grid.h(), dt);
  if (per_delay % grid.intervals() != 0) {
    std::ostringstream os;
    os << "theta grid with " << grid.intervals()
       << " cells does not align with " << per_delay << " steps per delay";
    throw GridError(os.str());
  }
  return per_delay / grid.intervals();
}

// -------------------------------------------------------------- SystemModel

SystemModel::SystemModel(MatrixXd A, MatrixXd B, MatrixXd D, double h, MatrixFunction E)
    : A_(std::move(A)), B_(std::move(B)), D_(std::move(D)), h_(h), E_(std::move(E)) {
  if (!(h_ > 0.0)) throw InputError("delay h must be positive");
  const auto n = A_.rows();
  require(n > 0 && A_.cols() == n, "A must be square, got " + shape(A_));
  require(B_.rows() == n && B_.cols() == n, "B must be n x n, got " + shape(B_));
  require(D_.rows() == n && D_.cols() >= 1, "D must be n x r, got " + shape(D_));
  require(D_.cols() <= n, "input dimension r must not exceed n");
  require(E_.rows() == n && E_.cols() == n, "E(theta) must be n x n");
  require(std::abs(E_.grid().h() - h_) <= kGridSlack * h_, "E grid spans a different delay");
  if (!A_.allFinite() || !B_.allFinite() || !D_.allFinite())
    throw InputError("system matrices must be finite");
}

SystemModel SystemModel::without_distributed(MatrixXd A, MatrixXd B, MatrixXd D,
                                             double h, int n_theta) {
  const auto n = A.rows();
  ThetaGrid grid(h, n_theta);
  return SystemModel(std::move(A), std::move(B), std::move(D), h,
                     MatrixFunction::zero(grid, n, n));
}

// -------------------------------------------------------------- CostWeights

CostWeights::CostWeights(MatrixXd Q, MatrixXd R) : Q_(std::move(Q)), R_(std::move(R)) {
  require(Q_.rows() == Q_.cols() && Q_.rows() > 0, "Q must be square");
  require(R_.rows() == R_.cols() && R_.rows() > 0, "R must be square");
  const double qs = std::max(1.0, Q_.cwiseAbs().maxCoeff());
  const double rs = std::max(1.0, R_.cwiseAbs().maxCoeff());
  if (!(Q_ - Q_.transpose()).isZero(1e-12 * qs)) throw InputError("Q must be symmetric");
  if (!(R_ - R_.transpose()).isZero(1e-12 * rs)) throw InputError("R must be symmetric");
  if (!(min_symmetric_eigenvalue(Q_) > 0.0)) throw InputError("Q must be positive definite");
  if (!(min_symmetric_eigenvalue(R_) > 0.0)) throw InputError("R must be positive definite");
  R_inv_ = R_.ldlt().solve(MatrixXd::Identity(R_.rows(), R_.cols()));
}

// --------------------------------------------------------------- ControlLaw

ControlLaw::ControlLaw(MatrixXd gamma0, MatrixFunction gamma1)
    : gamma0_(std::move(gamma0)), gamma1_(std::move(gamma1)) {
  require(same_shape(gamma0_, gamma1_.node(0)), "Gamma0 and Gamma1 shapes differ");
  if (!gamma0_.allFinite()) throw InputError("Gamma0 must be finite");
}

ControlLaw ControlLaw::zero(const SystemModel& sys) {
  return ControlLaw(MatrixXd::Zero(sys.r(), sys.n()),
                    MatrixFunction::zero(sys.grid(), sys.r(), sys.n()));
}

ControlLaw ControlLaw::proportional(const SystemModel& sys, const MatrixXd& gamma0) {
  return ControlLaw(gamma0, MatrixFunction::zero(sys.grid(), sys.r(), sys.n()));
}

double ControlLaw::distance(const ControlLaw& other) const {
  require(same_shape(gamma0_, other.gamma0_) && gamma1_.grid() == other.gamma1_.grid(),
          "control laws live on different shapes or grids");
  double d = spectral_norm(gamma0_ - other.gamma0_);
  for (int i = 0; i < gamma1_.grid().size(); ++i)
    d = std::max(d, spectral_norm(gamma1_.node(i) - other.gamma1_.node(i)));
  return d;
}

ControlLaw ControlLaw::blend(const ControlLaw& other, double weight) const {
  std::vector<MatrixXd> g1;
  g1.reserve(gamma1_.samples().size());
  for (int i = 0; i < gamma1_.grid().size(); ++i)
    g1.push_back(gamma1_.node(i) + weight * (other.gamma1_.node(i) - gamma1_.node(i)));
  return ControlLaw(gamma0_ + weight * (other.gamma0_ - gamma0_),
                    MatrixFunction(gamma1_.grid(), std::move(g1)));
}

// --------------------------------------------------------- ClosedLoopSystem

ClosedLoopSystem::ClosedLoopSystem(MatrixXd A0, MatrixXd A1, MatrixFunction G, double h)
    : A0_(std::move(A0)), A1_(std::move(A1)), G_(std::move(G)), h_(h) {
  const auto n = A0_.rows();
  require(A0_.cols() == n && A1_.rows() == n && A1_.cols() == n,
          "closed-loop matrices must be n x n");
  require(G_.rows() == n && G_.cols() == n, "G(theta) must be n x n");
  if (!(h_ > 0.0)) throw InputError("delay h must be positive");
  has_distributed_ = !G_.is_zero();
}

ClosedLoopSystem ClosedLoopSystem::from_parts(MatrixXd A0, MatrixXd A1, MatrixFunction G,
                                              double h) {
  return ClosedLoopSystem(std::move(A0), std::move(A1), std::move(G), h);
}

ClosedLoopSystem close_loop(const SystemModel& sys, const ControlLaw& law) {
  require(law.gamma0().rows() == sys.r() && law.gamma0().cols() == sys.n(),
          "Gamma0 must be r x n, got " + shape(law.gamma0()));
  require(law.gamma1().grid() == sys.grid(),
          "Gamma1 must share the system theta grid");
  std::vector<MatrixXd> g;
  g.reserve(sys.grid().size());
  for (int i = 0; i < sys.grid().size(); ++i)
    g.push_back(sys.E().node(i) + sys.D() * law.gamma1().node(i));
  return ClosedLoopSystem(sys.A() + sys.D() * law.gamma0(), sys.B(),
                          MatrixFunction(sys.grid(), std::move(g)), sys.h());
}

double sup_norm_G(const ClosedLoopSystem& cl) { return cl.G().sup_norm(); }

// ------------------------------------------------------------------ History

History::History(ThetaGrid grid, std::vector<VectorXd> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.size())
    throw DimensionError("history sample count does not match the theta grid");
  for (const auto& s : samples_) {
    require(s.size() == samples_.front().size(), "history samples differ in dimension");
    if (!s.allFinite()) throw InputError("history sample is not finite");
  }
}

History History::constant(const ThetaGrid& grid, const VectorXd& value) {
  return History(grid, std::vector<VectorXd>(grid.size(), value));
}

History History::from_function(const ThetaGrid& grid,
                               const std::function<VectorXd(double)>& phi) {
  std::vector<VectorXd> s;
  s.reserve(grid.size());
  for (int i = 0; i < grid.size(); ++i) s.push_back(phi(grid.node(i)));
  return History(grid, std::move(s));
}

VectorXd History::at(double theta) const {
  const auto [i, f] = grid_.locate(theta);
  if (f == 0.0) return samples_[i];
  return (1.0 - f) * samples_[i] + f * samples_[i + 1];
}

double History::sup_norm() const {
  double best = 0.0;
  for (const auto& s : samples_) best = std::max(best, s.norm());
  return best;
}

History History::scaled(double c) const {
  std::vector<VectorXd> s;
  s.reserve(samples_.size());
  for (const auto& v : samples_) s.push_back(c * v);
  return History(grid_, std::move(s));
}

}  // namespace tdopt
