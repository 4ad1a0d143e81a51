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
#ifndef TDOPT_ERRORS_HPP
#define TDOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdopt {

/// Error categories; the CLI maps each to a process exit code.
enum class ErrorKind {
  kInput = 2,        ///< malformed scenario, dimension or grid mismatch
  kInstability = 3,  ///< closed loop not exponentially stable, divergence
  kNumerical = 4,    ///< out-of-range evaluation, failed quadrature
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class GridError : public InputError {
 public:
  using InputError::InputError;
};

class InstabilityError : public Error {
 public:
  explicit InstabilityError(const std::string& what)
      : Error(ErrorKind::kInstability, what) {}
};

/// Raised when integration produces a non-finite state.
class DivergenceError : public InstabilityError {
 public:
  DivergenceError(double time, const std::string& what)
      : InstabilityError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace tdopt

#endif  // TDOPT_ERRORS_HPP
