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

// Shared fixtures for the unit tests.

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "graded/calculus.hpp"
#include "graded/space.hpp"

namespace graded::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

/// sum_k a_k (x_k - c_k)^2 with its gradient and lower bound 0.
inline Functional quadratic(const Eigen::VectorXd& a, Eigen::VectorXd c = {}, std::string space = "F") {
  if (c.size() == 0) c = Eigen::VectorXd::Zero(a.size());
  Functional f;
  f.name = "quadratic";
  f.space_id = std::move(space);
  f.dim = static_cast<int>(a.size());
  f.eval = [a, c](const Eigen::VectorXd& x) { return (a.array() * (x - c).array().square()).sum(); };
  f.gradient = [a, c](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * a.array() * (x - c).array(); };
  f.lower_bound = 0.0;
  return f;
}

inline Functional constant(int dim, double value, std::string space = "F") {
  Functional f;
  f.name = "constant";
  f.space_id = std::move(space);
  f.dim = dim;
  f.eval = [value](const Eigen::VectorXd&) { return value; };
  f.gradient = [dim](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(dim); };
  f.lower_bound = value;
  return f;
}

inline Functional arctan0(int dim, std::string space = "F") {
  Functional f;
  f.name = "arctan";
  f.space_id = std::move(space);
  f.dim = dim;
  f.eval = [](const Eigen::VectorXd& x) { return std::atan(x[0]); };
  f.gradient = [dim](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    g[0] = 1.0 / (1.0 + x[0] * x[0]);
    return g;
  };
  f.lower_bound = -M_PI / 2;
  return f;
}

inline SeminormFamily sup_family(int dim, int count) {
  return SeminormFamily::weighted("F", dim, count, SeminormCombine::Sup);
}

}  // namespace graded::testing
