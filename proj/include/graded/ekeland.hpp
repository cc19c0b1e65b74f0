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

// Variational-principle searches with a posteriori verification.
//
// Both searches build an improving sequence x_{k+1} in
//
//   S(x_k) = { y : f(y) + pen(y, x_k) <= f(x_k) },
//
// approximately minimising f over S(x_k) by shrinking-radius sampling. The
// classical penalty is pen(y, x) = a b sigma(y, x); the graded penalty is
// max_j lambda_j p_j(y - x). Every accepted point is also tested against the
// start x0, so the value-decrease and distance conclusions hold exactly in
// floating point. The strictness conclusion is checked on a finite grid.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graded/calculus.hpp"
#include "graded/space.hpp"

namespace graded {

/// sigma(y, x).
using DistanceOracle = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// A regular grid of per_axis^D points on a box, optionally shifted by
/// `offset` grid spacings along every axis.
struct GridSpec {
  Box box;
  int per_axis = 2;
  double offset = 0.0;

  /// Box of half-width `half_width` around `center` with about `target`
  /// points: per_axis = ceil(target^(1/D)).
  static GridSpec around(const Eigen::VectorXd& center, double half_width, int target, double offset = 0.0);

  std::size_t size() const;
  Eigen::VectorXd point(std::size_t index) const;
};

struct EVPConfig {
  /// Outer improving-sequence iterations.
  int max_iterations = 200;
  /// Samples per inner round; 0 means 2D + 32.
  int samples = 0;
  /// Inner sampling rounds per outer iteration.
  int inner_max = 120;
  double shrink = 0.5;
  /// The search stops once an outer step improves f by less than this.
  double tolerance = 1e-14;
  double initial_radius = 1.0;
  /// Inner rounds stop below min_radius * (1 + |y|_inf).
  double min_radius = 1e-12;
  std::uint64_t seed = 1;
  /// A sampled value below the floor raises UnboundedBelow.
  double floor = -1e12;
  /// Verification grid; a default grid around the witness is used if empty.
  std::optional<GridSpec> grid;
  double grid_half_width = 1.0;
  int grid_points = 4096;
  /// Move to grid points that violate strictness and keep searching.
  bool polish = true;
  int polish_passes = 64;
  /// Enforce a > 1 and theta > 1; the classical principle itself only needs a > 0.
  bool strict_hypotheses = true;
  /// Known inf estimate; otherwise estimated by sampling.
  std::optional<double> inf_estimate;
  std::optional<Box> inf_box;
  int inf_samples = 1024;

  /// Throws ConfigError naming the field.
  void validate() const;
  int sample_count(int dim) const { return samples > 0 ? samples : 2 * dim + 32; }
};

struct InfEstimate {
  double value = 0.0;
  /// "lower_bound", "sampled" or "supplied".
  std::string source;
  int samples = 0;
};

/// min(lower_bound, best sampled value over the box).
InfEstimate estimate_inf(const Functional& f, const Box& box, int samples = 1024, std::uint64_t seed = 1);

class PenaltySpec {
 public:
  static PenaltySpec ekeland(DistanceOracle sigma, double a, double b, std::string metric_name = "sigma");
  /// Uses lambdas_1..N; conclusions apply to j <= index.
  static PenaltySpec qiu(SeminormFamily family, double eta, std::vector<double> lambdas, int index);

  bool graded_form() const { return family_.has_value(); }
  double a() const { return a_; }
  double b() const { return b_; }
  double eta() const { return eta_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  int index() const { return index_; }
  const std::string& metric_name() const { return metric_name_; }
  const SeminormFamily& family() const { return *family_; }
  double sigma(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const { return sigma_(y, x); }

  /// pen(y, x).
  double operator()(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const;

  /// Margins of the value-decrease and distance conclusions for z against x0.
  Eigen::Vector2d anchor_margins(double f0, double fz, const Eigen::VectorXd& z, const Eigen::VectorXd& x0) const;

  /// Acceptance test against the start used during the search. It implies
  /// both anchor conclusions, the distance one strictly in graded form.
  bool admissible(double f0, double fy, const Eigen::VectorXd& y, const Eigen::VectorXd& x0) const;

 private:
  PenaltySpec() = default;

  DistanceOracle sigma_;
  std::string metric_name_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::optional<SeminormFamily> family_;
  double eta_ = 0.0;
  std::vector<double> lambdas_;
  int index_ = 0;
};

struct ConclusionCheck {
  std::string name;
  double margin = 0.0;
  bool pass = false;
};

struct VerificationReport {
  /// value-decrease, distance, strictness.
  std::vector<ConclusionCheck> conclusions;
  double min_margin = 0.0;
  bool valid = false;
  GridSpec grid;
  std::size_t grid_points = 0;
  /// Grid point attaining the strictness margin.
  Eigen::VectorXd worst_point;
};

struct TraceEntry {
  int iteration = 0;
  double previous = 0.0;
  double value = 0.0;
  /// pen(x_{k+1}, x_k); previous >= value + penalty holds as logged.
  double penalty = 0.0;
  double radius = 0.0;
  /// "sample" or "polish".
  std::string source;
};

enum class SearchStatus { Converged, BudgetExhausted };

std::string to_string(SearchStatus s);

struct EkelandWitness {
  GradedPoint point;
  double value = 0.0;
  Eigen::VectorXd start;
  double start_value = 0.0;
  InfEstimate inf;
  SearchStatus status = SearchStatus::Converged;
  int iterations = 0;
  long evaluations = 0;
  std::vector<TraceEntry> trace;
  VerificationReport verification;
  /// Verified on the grid with every margin >= -1e-9 and the search converged.
  bool valid = false;
};

constexpr double kWitnessSlack = 1e-9;

/// Shared search loop for any penalty.
EkelandWitness evp_search(const Functional& f, const PenaltySpec& penalty, const GradedPoint& x0,
                          const EVPConfig& cfg = {});

/// Classical principle: a > 1 (unless relaxed), b > 0, f(x) <= inf f + a.
EkelandWitness ekeland_search(const Functional& f, const DistanceOracle& sigma, const GradedPoint& x, double a,
                              double b, const EVPConfig& cfg = {}, std::string metric_name = "sigma");

/// Graded principle: eta > 0, lambdas positive with at least N entries,
/// 1 <= i <= N, f(x0) <= inf f + eta.
EkelandWitness qiu_search(const Functional& f, const SeminormFamily& family, const GradedPoint& x0, double eta,
                          const std::vector<double>& lambdas, int i, const EVPConfig& cfg = {});

/// Evaluates the three conclusions; the strictness margin is
/// min over grid y != z of f(y) + pen(y, z) - f(z).
VerificationReport verify_witness(const Functional& f, const EkelandWitness& witness, const PenaltySpec& penalty,
                                  const GridSpec& grid);

}  // namespace graded
