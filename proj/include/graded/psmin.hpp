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

// Palais-Smale checks, near-critical steps and minimizing-sequence drivers.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graded/bornology.hpp"
#include "graded/calculus.hpp"
#include "graded/ekeland.hpp"
#include "graded/finsler.hpp"
#include "graded/space.hpp"

namespace graded {

/// Where sequences live: the flat space with its bornology, or a Finsler
/// structure. Fixes the metric used for clustering and the dual norms.
class Setting {
 public:
  static Setting flat(SeminormFamily family, Bornology bornology);
  static Setting manifold(FinslerStructure structure);

  bool is_manifold() const { return structure_.has_value(); }
  std::string name() const { return is_manifold() ? "manifold" : "flat"; }
  const SeminormFamily& family() const { return family_; }
  const Bornology& bornology() const;
  const FinslerStructure& structure() const;

  /// Graded metric of the difference (flat) or the Finsler metric rho.
  double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Per n: max over catalog sets of P_B^n (flat) or ||L||^n_x (manifold).
  Eigen::VectorXd dual_norms(const DifferentialRep& L, const Eigen::VectorXd& x) const;

  PathOptions path;
  /// Sphere resolution for dual Finsler norms; 0 picks it from the dimension.
  int dual_resolution = 0;

 private:
  explicit Setting(SeminormFamily family) : family_(std::move(family)) {}

  SeminormFamily family_;
  std::optional<Bornology> bornology_;
  std::optional<FinslerStructure> structure_;
};

struct SequenceGenerator {
  std::string name;
  /// shrinking, escaping, oscillating, descent or custom.
  std::string kind;
  /// x_i for i >= 1.
  std::function<Eigen::VectorXd(int)> rule;
};

/// x_i = p + u / i.
SequenceGenerator shrinking_generator(std::string name, Eigen::VectorXd p, Eigen::VectorXd u);
/// x_i = base + i * sign * e_axis.
SequenceGenerator escaping_generator(std::string name, Eigen::VectorXd base, int axis, double sign);
/// x_i = a + u / i for odd i, b + u / i for even i.
SequenceGenerator oscillating_generator(std::string name, Eigen::VectorXd a, Eigen::VectorXd b, Eigen::VectorXd u);
/// x_i = points[i - 1], repeating the last point past the end.
SequenceGenerator trace_generator(std::string name, std::vector<Eigen::VectorXd> points);

/// Shrinking toward `center` and toward a jittered point, escaping along
/// every signed axis from a jittered base, and one two-point oscillation.
/// All randomness comes from `seed`.
std::vector<SequenceGenerator> library_generators(const Eigen::VectorXd& center, std::uint64_t seed);

struct PSMode {
  /// False: plain PS (bounded values). True: PS_c at `level`.
  bool at_level = false;
  double level = 0.0;
  std::string name() const { return at_level ? "PS_c" : "PS"; }
};

struct PSTolerances {
  /// Tail |f| may exceed the head maximum by this factor and still count as bounded.
  double growth = 1.05;
  /// Largest tail |f - c| for level convergence.
  double level = 0.1;
  /// Tail dual norms must drop below this fraction of the head maximum...
  double decay_ratio = 0.5;
  /// ...or below this absolute value.
  double gradient_abs = 1e-8;
  /// rho-radius for cluster detection.
  double cluster_radius = 0.05;
};

struct SequenceVerdict {
  std::string name;
  std::string kind;
  bool bounded = false;
  bool level_ok = false;
  bool decays = false;
  bool qualifying = false;
  double head_value_max = 0.0;
  double tail_value_max = 0.0;
  double tail_level_gap = 0.0;
  Eigen::VectorXd head_gradient;
  Eigen::VectorXd tail_gradient;
  std::optional<Eigen::VectorXd> cluster;
  double cluster_radius = 0.0;
};

struct PSReport {
  PSMode mode;
  int horizon = 0;
  PSTolerances tolerances;
  std::vector<SequenceVerdict> sequences;
  int qualifying = 0;
  bool pass = true;
  /// First qualifying sequence without a cluster point, empty on PASS.
  std::string failing_sequence;
};

PSReport ps_check(const Functional& f, const Setting& setting, const std::vector<SequenceGenerator>& gens,
                  const PSMode& mode, int horizon = 64, const PSTolerances& tolerances = {},
                  const DifferenceScheme& scheme = {});

/// Tail covering over the last half of `seq`: a tail point p whose closed
/// balls of radius r and r/2 both hold at least half of the tail. Among
/// candidates the largest r/2 count wins, then the lexicographically
/// smallest point. Needs at least 16 points.
std::optional<Eigen::VectorXd> cluster_point(const std::vector<Eigen::VectorXd>& seq, const DistanceOracle& metric,
                                             double radius);

struct DualBound {
  /// Catalog set name, or "finsler" for dual Finsler norms.
  std::string set;
  int n = 1;
  double value = 0.0;
  double bound = 0.0;
  /// Bound provable from the search itself, when it differs from `bound`.
  std::optional<double> proven_bound;
  double tolerance = 0.0;
  bool pass = false;
};

struct CriticalCertificate {
  /// frechet-step, manifold-step or driver.
  std::string kind;
  /// epsilon, theta or i_max.
  std::string parameter_name;
  double parameter = 0.0;
  GradedPoint point;
  Eigen::VectorXd start;
  double value = 0.0;
  double level = 0.0;
  std::string level_source;
  double value_gap = 0.0;
  double value_tolerance = 0.0;
  bool value_ok = false;
  double bound = 0.0;
  std::string bound_rule;
  std::vector<DualBound> dual_bounds;
  bool duals_ok = false;
  /// value_ok and duals_ok: the point is in the K_c surrogate.
  bool in_critical_set = false;
  std::optional<EkelandWitness> witness;
  std::vector<std::string> notes;
};

struct StepConfig {
  EVPConfig evp;
  DifferenceScheme scheme;
  /// Curve budget for rho in the manifold step.
  PathOptions path;
  /// Slack on measured dual norms against the stated bound.
  double dual_tolerance = 1e-6;
};

/// Graded principle with eta = eps and lambda_j = sqrt(eps), conclusions
/// for j <= i. Stated bound P_B^n(df(z)) <= sqrt(eps); each entry also
/// carries the bound sqrt(eps) sup_{e in B} p_N(e) implied by the search.
CriticalCertificate frechet_min_step(const Functional& f, const SeminormFamily& family, const Bornology& bornology,
                                     double eps, const GradedPoint& x, int i, const StepConfig& cfg = {});

/// Classical principle under rho with a = theta^2, b = 1/theta. Bound
/// ||df(m_theta)||^n <= theta^2 beta / alpha for all n.
CriticalCertificate manifold_min_step(const Functional& f, const FinslerStructure& S, double theta,
                                      const GradedPoint& m, const CompatibilityConstants& consts,
                                      const StepConfig& cfg = {});

struct DriverConfig {
  StepConfig step;
  int i_max = 100;
  double cluster_radius = 0.05;
  double dual_tolerance = 1e-2;
  double value_tolerance = 1e-2;
  /// Region for the inf estimate and, in the manifold setting, for the
  /// compatibility constants. Defaults to a unit box around the start.
  std::optional<Box> region;
  std::optional<CompatibilityConstants> compat;
  CompatOptions compat_options;
  /// Sampling rounds allowed when the previous iterate sits above c + 1/i.
  int predescent_rounds = 4000;
  std::uint64_t seed = 1;
};

struct DriverStep {
  int i = 0;
  double parameter = 0.0;
  Eigen::VectorXd x;
  double value = 0.0;
  double inf_estimate = 0.0;
  /// inf_estimate + 1/i.
  double level_bound = 0.0;
  bool within_level = false;
  bool predescent = false;
  bool in_region = true;
};

struct DriverResult {
  std::string setting;
  std::vector<DriverStep> trace;
  double inf_estimate = 0.0;
  std::string inf_source;
  std::optional<Eigen::VectorXd> cluster;
  std::optional<CriticalCertificate> certificate;
  /// No cluster point: the trace is evidence of a PS failure.
  bool ps_failure = false;
  bool region_ok = true;
  std::optional<CompatibilityConstants> compat;
  /// Set when a step failed; the trace holds the steps completed before it.
  std::optional<std::string> failure;
  std::vector<std::string> notes;
};

/// eps = 1/i (flat) or theta^2 = 1/i (manifold) for i = 1..i_max, each step
/// seeded at the previous iterate.
DriverResult minimizing_sequence_driver(const Functional& f, const Setting& setting, const GradedPoint& x0,
                                        const DriverConfig& cfg = {});

}  // namespace graded
