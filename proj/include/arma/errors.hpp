// Copyright 2026 The arma-planar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARMA_ERRORS_HPP_
#define ARMA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace arma {

// Base class for all errors raised by the library. `exit_code()` is the
// process status the CLI maps the error to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int code = 1)
      : std::runtime_error(what), code_(code) {}
  int exit_code() const { return code_; }

 private:
  int code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what, 1) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(what, 1) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

class CheckpointError : public Error {
 public:
  explicit CheckpointError(const std::string& what) : Error(what, 3) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(what, 4) {}
};

class InfeasibleCommandError : public Error {
 public:
  explicit InfeasibleCommandError(const std::string& what) : Error(what, 1) {}
};

// A metric is undefined for the given data.
class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what) : Error(what, 1) {}
};

// Raised when a history-dependent estimate is requested before the window
// has filled.
class WarmupError : public Error {
 public:
  explicit WarmupError(const std::string& what) : Error(what, 1) {}
};

}  // namespace arma

#endif  // ARMA_ERRORS_HPP_
