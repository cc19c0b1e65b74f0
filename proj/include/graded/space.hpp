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

// Finite truncations of graded Frechet spaces.
//
// A space is R^D carrying N seminorms p_1 <= p_2 <= ... <= p_N. Every
// seminorm is a weighted coordinate rule
//
//   sup:  p_n(x) = max_k w_n(k) |x_k|
//   sum:  p_n(x) = sum_k w_n(k) |x_k|
//   l2:   p_n(x) = sqrt(sum_k (w_n(k) x_k)^2)
//
// with either the power weights w_n(k) = (1 + k)^n or a user table. Tables
// whose rows do not dominate each other are wrapped as max(p_1, ..., p_n).

#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "graded/error.hpp"

namespace graded {

/// Axis-aligned box [lo, hi] in coordinates.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box cube(Eigen::Index dim, double half_width) {
    return {Eigen::VectorXd::Constant(dim, -half_width), Eigen::VectorXd::Constant(dim, half_width)};
  }
  static Box around(const Eigen::VectorXd& center, double half_width) {
    return {center.array() - half_width, center.array() + half_width};
  }

  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const {
    return ((x.array() >= lo.array() - slack) && (x.array() <= hi.array() + slack)).all();
  }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

/// A coefficient vector tagged with the identity of its space.
class GradedPoint {
 public:
  GradedPoint(std::string space_id, Eigen::VectorXd coords);

  const std::string& space_id() const { return space_id_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }

  /// Throws SpaceMismatch unless `other` lives in the same space.
  void require_same_space(const GradedPoint& other) const;

 private:
  std::string space_id_;
  Eigen::VectorXd coords_;
};

enum class SeminormCombine { Sup, Sum, L2 };

std::string to_string(SeminormCombine c);
SeminormCombine combine_from_string(const std::string& name);

class SeminormFamily {
 public:
  /// Power weights w_n(k) = (1 + k)^n, n = 1..count, k = 0..dim-1.
  static SeminormFamily weighted(std::string space_id, int dim, int count, SeminormCombine combine);

  /// One row of non-negative weights per seminorm (count x dim).
  static SeminormFamily from_table(std::string space_id, SeminormCombine combine,
                                   Eigen::MatrixXd weights);

  const std::string& space_id() const { return space_id_; }
  int dim() const { return static_cast<int>(weights_.cols()); }
  int count() const { return static_cast<int>(weights_.rows()); }
  SeminormCombine combine() const { return combine_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  bool power_rule() const { return power_rule_; }
  /// True when the raw rule was not monotone and cumulative-max wrapping applies.
  bool wrapped() const { return wrapped_; }
  /// True when some seminorm has a zero weight, so it has a kernel.
  bool degenerate() const { return (weights_.array() == 0.0).any(); }
  std::string rule_name() const;

  /// p_n(v) for 1 <= n <= count, evaluated on raw coordinates.
  template <typename Derived>
  typename Derived::Scalar operator()(int n, const Eigen::MatrixBase<Derived>& v) const {
    check_index(n);
    if (v.size() != weights_.cols()) throw DomainError("seminorm argument has wrong dimension");
    if (!wrapped_) return raw(n, v);
    using Scalar = typename Derived::Scalar;
    Scalar best = raw(1, v);
    for (int m = 2; m <= n; ++m) {
      const Scalar value = raw(m, v);
      if (value > best) best = value;
    }
    return best;
  }

  /// p_n(x) with space checking.
  double eval(int n, const GradedPoint& x) const;

  /// (p_1(v), ..., p_N(v)).
  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> all(const Eigen::MatrixBase<Derived>& v) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(count());
    for (int n = 1; n <= count(); ++n) out[n - 1] = (*this)(n, v);
    return out;
  }

  void check_index(int n) const {
    if (n < 1 || n > count())
      throw DomainError("seminorm index " + std::to_string(n) + " outside 1.." + std::to_string(count()));
  }
  void require_space(const GradedPoint& x) const;

 private:
  SeminormFamily(std::string space_id, SeminormCombine combine, Eigen::MatrixXd weights, bool power_rule);

  template <typename Derived>
  typename Derived::Scalar raw(int n, const Eigen::MatrixBase<Derived>& v) const {
    using Scalar = typename Derived::Scalar;
    const auto w = weights_.row(n - 1).transpose().template cast<Scalar>();
    switch (combine_) {
      case SeminormCombine::Sup:
        return (w.array() * v.array().abs()).maxCoeff();
      case SeminormCombine::Sum:
        return (w.array() * v.array().abs()).sum();
      case SeminormCombine::L2:
        return (w.array() * v.array()).matrix().norm();
    }
    return Scalar(0);
  }

  std::string space_id_;
  SeminormCombine combine_;
  Eigen::MatrixXd weights_;
  bool power_rule_;
  bool wrapped_;
};

/// Bounded metric sum_n 2^-n q_n / (1 + q_n) of a vector of seminorm values.
template <typename Derived>
typename Derived::Scalar bounded_sum(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  Scalar weight(0.5);
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    total += weight * values[n] / (Scalar(1) + values[n]);
    weight *= Scalar(0.5);
  }
  return total;
}

/// Graded metric on a coordinate difference x - y.
template <typename Derived>
typename Derived::Scalar graded_metric_of_difference(const SeminormFamily& family,
                                                     const Eigen::MatrixBase<Derived>& diff) {
  return bounded_sum(family.all(diff));
}

/// sum_{n=1..N} 2^-n p_n(x - y) / (1 + p_n(x - y)), a pseudometric in [0, 1).
double graded_metric(const SeminormFamily& family, const GradedPoint& x, const GradedPoint& y);

/// Upper bound sum_{n=1..N} 2^-n of the graded metric.
double graded_metric_bound(int count);

}  // namespace graded
