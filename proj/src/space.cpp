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

#include "graded/space.hpp"

#include <cmath>

namespace graded {

GradedPoint::GradedPoint(std::string space_id, Eigen::VectorXd coords)
    : space_id_(std::move(space_id)), coords_(std::move(coords)) {
  if (!coords_.allFinite()) throw DomainError("point in space '" + space_id_ + "' has non-finite coordinates");
}

void GradedPoint::require_same_space(const GradedPoint& other) const {
  if (other.space_id_ != space_id_) throw SpaceMismatch(space_id_, other.space_id_);
  if (other.dim() != dim()) throw DomainError("points of space '" + space_id_ + "' differ in dimension");
}

std::string to_string(SeminormCombine c) {
  switch (c) {
    case SeminormCombine::Sup:
      return "sup";
    case SeminormCombine::Sum:
      return "sum";
    case SeminormCombine::L2:
      return "l2";
  }
  return "sup";
}

SeminormCombine combine_from_string(const std::string& name) {
  if (name == "sup") return SeminormCombine::Sup;
  if (name == "sum") return SeminormCombine::Sum;
  if (name == "l2") return SeminormCombine::L2;
  throw DomainError("unknown seminorm combine rule '" + name + "' (expected sup, sum or l2)");
}

SeminormFamily::SeminormFamily(std::string space_id, SeminormCombine combine, Eigen::MatrixXd weights,
                               bool power_rule)
    : space_id_(std::move(space_id)), combine_(combine), weights_(std::move(weights)), power_rule_(power_rule) {
  if (weights_.rows() < 1) throw DomainError("seminorm family needs at least one seminorm");
  if (weights_.cols() < 1) throw DomainError("seminorm family needs a positive dimension");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any())
    throw DomainError("seminorm weights must be finite and non-negative");
  // Row-wise domination of the weights makes every combine rule monotone in n.
  wrapped_ = false;
  for (Eigen::Index n = 1; n < weights_.rows(); ++n) {
    if ((weights_.row(n).array() < weights_.row(n - 1).array()).any()) {
      wrapped_ = true;
      break;
    }
  }
}

SeminormFamily SeminormFamily::weighted(std::string space_id, int dim, int count, SeminormCombine combine) {
  if (dim < 1) throw DomainError("dimension must be positive");
  if (count < 1) throw DomainError("seminorm count must be positive");
  Eigen::MatrixXd w(count, dim);
  for (int n = 1; n <= count; ++n)
    for (int k = 0; k < dim; ++k) w(n - 1, k) = std::pow(1.0 + k, n);
  return SeminormFamily(std::move(space_id), combine, std::move(w), true);
}

SeminormFamily SeminormFamily::from_table(std::string space_id, SeminormCombine combine,
                                          Eigen::MatrixXd weights) {
  return SeminormFamily(std::move(space_id), combine, std::move(weights), false);
}

std::string SeminormFamily::rule_name() const {
  const std::string base = power_rule_ ? "weighted-" : "table-";
  return base + to_string(combine_);
}

double SeminormFamily::eval(int n, const GradedPoint& x) const {
  require_space(x);
  return (*this)(n, x.coords());
}

void SeminormFamily::require_space(const GradedPoint& x) const {
  if (x.space_id() != space_id_) throw SpaceMismatch(space_id_, x.space_id());
  if (x.dim() != dim()) throw DomainError("point dimension does not match space '" + space_id_ + "'");
}

double graded_metric(const SeminormFamily& family, const GradedPoint& x, const GradedPoint& y) {
  family.require_space(x);
  family.require_space(y);
  return graded_metric_of_difference(family, x.coords() - y.coords());
}

double graded_metric_bound(int count) { return 1.0 - std::ldexp(1.0, -count); }

}  // namespace graded
