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

// A finite catalog of bounded sets standing in for a bornology.
//
// Each member is a point cloud C and denotes its balanced hull
// {s c : c in C, |s| <= 1}. Sups of |L(e)| over a member are then finite
// maxima over the cloud, inclusion is decidable, and r B is contained in
// rho B whenever |r| <= rho.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "graded/space.hpp"

namespace graded {

struct BoundedSet {
  std::string name;
  /// Name of the unscaled cloud this set was generated from.
  std::string base;
  double scale = 1.0;
  /// Seminorm index whose unit sphere the base cloud samples, 0 if none.
  int sphere_of = 0;
  /// dim x count, one point per column.
  Eigen::MatrixXd points;
};

struct BornologyOptions {
  /// Grid points per cube edge for sphere sampling; 0 picks a size from dim.
  int resolution = 0;
  /// Scaling radii. Every base cloud is instantiated at each radius.
  std::vector<double> radii{1.0, 2.0};
  /// Add the union of all sphere clouds at each radius, which makes the
  /// catalog directed.
  bool include_unions = true;
};

class Bornology {
 public:
  Bornology(std::string space_id, int dim, int count, std::vector<BoundedSet> sets, std::vector<double> radii);

  const std::string& space_id() const { return space_id_; }
  int dim() const { return dim_; }
  int count() const { return count_; }
  const std::vector<BoundedSet>& sets() const { return sets_; }
  const std::vector<double>& radii() const { return radii_; }

  /// Throws DomainError for names not in the catalog.
  const BoundedSet& find(const std::string& name) const;
  const BoundedSet* find_scaled(const std::string& base, double scale) const;

  /// Catalog member designated to contain r B: the cloud of B's base at the
  /// smallest catalog radius >= |r| * scale(B). Empty above the largest radius.
  const BoundedSet* designated_superset(const BoundedSet& b, double r) const;

 private:
  std::string space_id_;
  int dim_;
  int count_;
  std::vector<BoundedSet> sets_;
  std::vector<double> radii_;
};

/// Samples of the unit sphere {v : p_n(v) = 1}.
///
/// The grid on the boundary of [-1, 1]^D is pulled back through the inverse
/// weights of p_n, then normalised. Sup-rule corners and sum-rule vertices lie
/// on the grid whenever `resolution` is odd. Points with p_n = 0 (kernel
/// directions) are dropped.
Eigen::MatrixXd sphere_cloud(const SeminormFamily& family, int n, int resolution);

int default_resolution(int dim);

/// Sphere clouds of every p_n plus their unions, instantiated at each radius.
Bornology surrogate_bornology(const SeminormFamily& family, const BornologyOptions& options = {});

/// True when `point` lies in the balanced hull of the cloud.
bool balanced_hull_contains(const Eigen::MatrixXd& cloud, const Eigen::VectorXd& point, double tol = 1e-9);
/// True when every point of `inner` lies in the balanced hull of `outer`.
bool balanced_hull_contains_all(const Eigen::MatrixXd& outer, const Eigen::MatrixXd& inner, double tol = 1e-9);

struct ScalingStatus {
  double radius;
  bool pass;
  /// First base set with no designated superset containing radius * B.
  std::string failing_set;
};

struct BornologyReport {
  bool covering = true;
  std::vector<int> uncovered_directions;
  bool directed = true;
  std::optional<std::pair<std::string, std::string>> undirected_pair;
  std::vector<ScalingStatus> scaling;
  bool scaling_closed = true;
  /// p_n indices whose unit-sphere surrogate is missing from the catalog.
  std::vector<int> missing_surrogates;
  bool degenerate_seminorms = false;
  std::vector<std::string> notes;

  bool all_pass() const { return covering && directed && scaling_closed && missing_surrogates.empty(); }
};

BornologyReport validate_bornology(const Bornology& bornology, const SeminormFamily& family);

}  // namespace graded
