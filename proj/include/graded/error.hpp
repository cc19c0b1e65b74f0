// Copyright 2026 The graded-min Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace graded {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands from two different truncated spaces were combined.
class SpaceMismatch : public Error {
 public:
  SpaceMismatch(const std::string& expected, const std::string& got)
      : Error("space mismatch: expected '" + expected + "', got '" + got + "'") {}
};

/// Index out of range, point outside an atlas, unknown set and similar.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A functional produced a non-finite value while differencing.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double step)
      : Error(what + " (step t = " + std::to_string(step) + ")"), step_(step) {}
  double step() const { return step_; }

 private:
  double step_;
};

/// A search drove the functional below the configured floor.
class UnboundedBelow : public Error {
 public:
  using Error::Error;
};

/// A hypothesis checked at entry does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid problem configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace graded
