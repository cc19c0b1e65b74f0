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

// Chart-based Finsler structures on a truncated model space.
//
// Manifold points and tangent vectors are written in a reference coordinate
// system; a chart phi maps its domain box into the model space. Tangent
// norms act on reference tangent vectors, so a chart-coordinate velocity u at
// y = phi(x) is measured as ||d phi^-1(y) u||_x. Pseudometrics d^n are upper
// bounds from piecewise-linear curves in one chart, and
//
//   rho(x, y) = sum_{n=1..N} 2^-n d^n(x, y) / (1 + d^n(x, y)).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graded/calculus.hpp"
#include "graded/space.hpp"

namespace graded {

enum class ChartKind { Identity, Affine, Sinh };

class Chart {
 public:
  static Chart identity(std::string id, Box domain);
  /// phi(x) = A x + b.
  static Chart affine(std::string id, Box domain, Eigen::MatrixXd A, Eigen::VectorXd b);
  /// phi(x)_k = sinh(s x_k) / s.
  static Chart sinh_warp(std::string id, Box domain, double scale);

  const std::string& id() const { return id_; }
  const Box& domain() const { return domain_; }
  ChartKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(domain_.dim()); }
  /// True when phi is affine, so d phi^-1 is constant.
  bool linear() const { return kind_ != ChartKind::Sinh; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd backward(const Eigen::VectorXd& y) const;
  /// d phi^-1(y) u.
  Eigen::VectorXd backward_tangent(const Eigen::VectorXd& y, const Eigen::VectorXd& u) const;
  bool contains(const Eigen::VectorXd& x) const { return domain_.contains(x, 1e-12); }

  /// Largest |backward(forward(x)) - x| over seeded samples of the domain.
  double roundtrip_error(int samples = 64, std::uint64_t seed = 17) const;

  std::string kind_name() const;

 private:
  Chart(std::string id, Box domain, ChartKind kind) : id_(std::move(id)), domain_(std::move(domain)), kind_(kind) {}

  std::string id_;
  Box domain_;
  ChartKind kind_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd A_inv_;
  Eigen::VectorXd b_;
  double scale_ = 1.0;
};

enum class TangentRule { Flat, Conformal };

/// ||v||^n_x = c(x) p_n(v) with c = 1 (flat) or c(x) = 1 + kappa p_1(x)^2.
class FinslerStructure {
 public:
  FinslerStructure(SeminormFamily family, std::vector<Chart> atlas, TangentRule rule, double kappa = 1.0);

  static FinslerStructure flat(SeminormFamily family, Box domain);
  static FinslerStructure conformal(SeminormFamily family, Box domain, double kappa = 1.0);

  const SeminormFamily& family() const { return family_; }
  const std::vector<Chart>& atlas() const { return atlas_; }
  TangentRule rule() const { return rule_; }
  double kappa() const { return kappa_; }
  int dim() const { return family_.dim(); }
  int count() const { return family_.count(); }
  std::string rule_name() const { return rule_ == TangentRule::Flat ? "flat" : "conformal"; }

  double conformal_factor(const Eigen::VectorXd& x) const;
  /// Lower bound c_min of the conformal factor.
  double factor_floor() const { return 1.0; }

  /// Throws DomainError when x is outside every chart.
  const Chart& chart_containing(const Eigen::VectorXd& x) const;
  /// First chart whose domain holds both points, or nullptr.
  const Chart* common_chart(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  const Chart& chart(const std::string& id) const;

 private:
  SeminormFamily family_;
  std::vector<Chart> atlas_;
  TangentRule rule_;
  double kappa_;
};

/// ||v||^n_x. Throws DomainError when x is outside the atlas.
double finsler_norm(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& v, int n);

struct Curve {
  std::string chart_id;
  /// Nodes in chart coordinates, joined by straight segments.
  std::vector<Eigen::VectorXd> nodes;
};

/// Straight segment from x to y (reference coordinates) written in `chart`.
Curve straight_curve(const Chart& chart, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int nodes = 2);

/// L^n of one segment between chart-coordinate nodes, adaptive Gauss-Legendre.
double segment_length(const FinslerStructure& S, const Chart& chart, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b, int n, double tolerance = 1e-13);

/// L^n(gamma) = integral of ||gamma'(t)||^n_gamma(t); additive over segments.
double curve_length(const FinslerStructure& S, const Curve& curve, int n);

struct PathOptions {
  /// Node budget of the final curve, endpoints included.
  int nodes = 17;
  int sweeps = 3;
  int golden_iterations = 40;
  /// Optimise even where the straight segment is provably a geodesic.
  bool force_optimize = false;
};

struct PathResult {
  double length = 0.0;
  Curve curve;
  /// False when the straight segment was returned without optimisation.
  bool optimized = false;
  /// Lengths after each level of the dyadic node ladder 2, 3, 5, 9, ...
  std::vector<double> ladder;
};

/// Upper bound for d^n(x, y) from curves in the first chart holding both
/// points. The straight segment is returned when it is provably optimal:
/// in dimension one, or for the flat rule in an affine chart. Otherwise
/// coordinate descent with golden-section line search refines a dyadic node
/// ladder, each level seeded by the previous optimum, so lengths never
/// increase along the ladder. Endpoints are put in lexicographic order
/// first, which makes the result exactly symmetric.
PathResult pseudometric_path(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                             const PathOptions& options = {});
/// Same search without the endpoint reordering.
PathResult directed_path(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                         const PathOptions& options = {});

double pseudometric(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                    const PathOptions& options = {});

/// (d^1, ..., d^N).
Eigen::VectorXd pseudometrics(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const PathOptions& options = {});

double finsler_metric(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const PathOptions& options = {});

struct AxiomOptions {
  int points = 96;
  int directions = 12;
  int bisection_steps = 60;
  std::uint64_t seed = 5;
  PathOptions path;
};

struct AxiomReport {
  double K = 0.0;
  /// Largest tested rho-radius on which the two-sided bound holds.
  double radius = 0.0;
  /// max over accepted samples of max(ratio, 1 / ratio).
  double worst_ratio = 1.0;
  /// True when no sample violated the bound.
  bool holds_everywhere = false;
  /// rho-distance of the closest violating sample, 0 if none.
  double first_violation = 0.0;
  int samples = 0;
};

/// Locates by bisection the largest rho-radius r such that every sampled x
/// with rho(x, x0) < r satisfies (1/K) ||dphi^-1 v||_x0 <= ||dphi^-1 v||_x
/// <= K ||dphi^-1 v||_x0 for the sampled directions and all n.
AxiomReport verify_finsler_axioms(const FinslerStructure& S, const Chart& chart, const Eigen::VectorXd& x0, double K,
                                  const AxiomOptions& options = {});

struct CompatibilityConstants {
  std::string chart_id;
  double alpha = 0.0;
  double beta = 0.0;
  Box region;
  int pairs = 0;
};

struct CompatOptions {
  /// Grid points per axis; pairs of grid points are all compared.
  int grid = 5;
  /// Extra pairs at geometric separations, down to 1e-4 of the diameter.
  int near_pairs = 48;
  std::uint64_t seed = 11;
  PathOptions path;
};

/// alpha = min, beta = max over sampled pairs and n of
/// p_n(phi(x) - phi(y)) / rho(x, y), for pairs with rho > 0.
CompatibilityConstants estimate_compatibility(const FinslerStructure& S, const Chart& chart, const Box& region,
                                              const CompatOptions& options = {});

struct DualNormResult {
  double value = 0.0;
  /// w is nonzero on a direction of zero length, so the sup is unbounded.
  bool infinite = false;
  int degenerate_directions = 0;
  int directions = 0;
};

/// sup { w(v) : ||v||^n_x = 1 } over sampled unit vectors. Kernel directions
/// are excluded from the sup and counted; w nonzero on one sets `infinite`.
DualNormResult dual_finsler_norm(const FinslerStructure& S, const DifferentialRep& w, const Eigen::VectorXd& x, int n,
                                 int resolution = 0);

}  // namespace graded
