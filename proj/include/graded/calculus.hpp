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

// Directional (Michal-Bastiani) derivatives of functionals on a truncated
// space and the bornology dual seminorms of the resulting differentials.
//
// On a finite truncation C^1 in the directional sense and C^1 with respect
// to a bornology that contains the compact sets coincide, so a single
// differential type serves both.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graded/bornology.hpp"
#include "graded/space.hpp"

namespace graded {

struct Functional {
  std::string name;
  std::string space_id;
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> eval;
  /// Empty when no closed-form gradient is known.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::optional<double> lower_bound;

  double operator()(const Eigen::VectorXd& x) const { return eval(x); }
  double operator()(const GradedPoint& x) const;
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// df(x) as its values on the basis directions.
struct DifferentialRep {
  std::string space_id;
  Eigen::VectorXd basis_values;
  Eigen::VectorXd base_point;

  /// df(x)(h) = sum_k h_k basis_values[k].
  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& h) const {
    return basis_values.dot(h);
  }
  DifferentialRep scaled(double t) const { return {space_id, t * basis_values, base_point}; }
};

struct DifferenceScheme {
  /// Base step, multiplied by 1 + p_1(x).
  double base_step = 1e-4;
  bool prefer_analytic = false;
};

/// Central differences at t and t/2 combined by one Richardson step.
double gateaux_derivative(const Functional& f, const SeminormFamily& family, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& h, const DifferenceScheme& scheme = {});
double gateaux_derivative(const Functional& f, const SeminormFamily& family, const GradedPoint& x,
                          const GradedPoint& h, const DifferenceScheme& scheme = {});

DifferentialRep differential(const Functional& f, const SeminormFamily& family, const Eigen::VectorXd& x,
                             const DifferenceScheme& scheme = {});
DifferentialRep differential(const Functional& f, const SeminormFamily& family, const GradedPoint& x,
                             const DifferenceScheme& scheme = {});

/// sup_{e in cloud} |L(e)|.
double cloud_sup(const DifferentialRep& L, const Eigen::MatrixXd& cloud);

/// P_B^n(L) = sup_{e in B} p_n(L(e)). The target is R, where every p_n is the
/// absolute value, so the result does not depend on n; n is range-checked.
double dual_seminorm(const DifferentialRep& L, const Bornology& b, const std::string& set_name, int n);

/// max over catalog sets and n of P_B^n(L).
double max_dual_seminorm(const DifferentialRep& L, const Bornology& b);

struct ResolutionCheck {
  int resolution;
  int doubled_resolution;
  double sup;
  double doubled_sup;
  bool converged;
};

/// Compares the sphere-cloud sup of |L| for p_n at `resolution` and at the
/// nested doubled grid 2 * resolution - 1.
ResolutionCheck dual_resolution_check(const DifferentialRep& L, const SeminormFamily& family, int n,
                                      int resolution, double tolerance = 1e-6);

struct C1Options {
  /// Cells per axis at the coarsest level; each refinement doubles it.
  int cells = 8;
  int refinements = 2;
  /// Sample lines per axis through the region (the centre line is always one).
  int lines = 4;
  /// Jumps below this are treated as continuous outright.
  double absolute_tolerance = 1e-6;
  /// Required shrink factor of the jump from coarsest to finest level.
  double shrink = 0.75;
  std::uint64_t seed = 1;
  DifferenceScheme scheme;
};

struct C1Level {
  int cells;
  double spacing;
  double jump;
};

struct C1Report {
  std::vector<C1Level> levels;
  double worst_jump = 0.0;
  Eigen::VectorXd worst_at;
  int worst_direction = -1;
  bool pass = true;
};

/// Sampled continuity check of (x, h) -> df(x)(h) on a box. Neighbouring
/// cell centres along sample lines are compared; the worst jump must vanish
/// or shrink as the mesh refines.
C1Report check_c1(const Functional& f, const SeminormFamily& family, const Box& region, const C1Options& options = {});

}  // namespace graded
