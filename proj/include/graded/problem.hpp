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

// Problem configuration: JSON ingestion, defaults, validation and the
// built-in problem library. A config may name a library problem under
// "problem"; its own fields are then merged over the library entry.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "graded/bornology.hpp"
#include "graded/calculus.hpp"
#include "graded/ekeland.hpp"
#include "graded/finsler.hpp"
#include "graded/psmin.hpp"
#include "graded/space.hpp"

namespace graded {

struct SpaceDecl {
  std::string id = "F";
  int dim = 1;
  int count = 1;
  SeminormCombine combine = SeminormCombine::Sup;
  /// count x dim table; power weights when empty.
  std::optional<Eigen::MatrixXd> weights;
};

struct FunctionalDecl {
  /// quadratic, arctan, abs, rosenbrock or expression.
  std::string name = "quadratic";
  std::vector<double> coefficients;
  std::vector<double> center;
  std::string expression;
  std::vector<std::string> gradient;
  std::optional<double> lower_bound;
};

struct StructureDecl {
  /// flat or conformal.
  std::string kind = "flat";
  double kappa = 1.0;
  /// identity, affine or sinh; the chart domain is the region box.
  std::string chart = "identity";
  double scale = 1.0;
  std::optional<Eigen::MatrixXd> matrix;
  std::optional<Eigen::VectorXd> offset;
};

struct EkelandParams {
  double a = 2.0;
  double b = 1.0;
  /// graded, seminorm or finsler.
  std::string metric = "graded";
  int n = 1;
};

struct QiuParams {
  double eta = 0.04;
  /// Empty means lambda_j = sqrt(eta).
  std::vector<double> lambdas;
  /// 0 means N.
  int index = 0;
};

struct MinimizeParams {
  /// flat or manifold.
  std::string setting = "flat";
  int i_max = 100;
  double cluster_radius = 0.05;
  double dual_tolerance = 1e-2;
  double value_tolerance = 1e-2;
  int predescent_rounds = 4000;
};

struct PSParams {
  /// PS or PS_c.
  std::string mode = "PS";
  double level = 0.0;
  int horizon = 64;
  /// Add the driver trace as a descent-driven sequence.
  bool descent = true;
  /// flat or manifold.
  std::string setting = "flat";
  PSTolerances tolerances;
};

struct MetricParams {
  std::optional<Eigen::VectorXd> x;
  std::optional<Eigen::VectorXd> y;
};

struct CompatParams {
  std::vector<double> thetas{1.05, 1.5, 3.0};
  double K = 2.0;
  int grid = 5;
  int near_pairs = 48;
};

struct ProblemConfig {
  std::string problem;
  SpaceDecl space;
  BornologyOptions bornology;
  FunctionalDecl functional;
  StructureDecl structure;
  Box region;
  Eigen::VectorXd start;
  std::uint64_t seed = 1;
  EVPConfig search;
  DifferenceScheme difference;
  PathOptions path;
  C1Options c1;
  EkelandParams ekeland;
  QiuParams qiu;
  MinimizeParams minimize;
  PSParams ps_check;
  MetricParams metric;
  CompatParams compat;
};

/// Names of the built-in problems.
std::vector<std::string> library_problems();
/// Names accepted under functional.name.
std::vector<std::string> functional_names();
/// Library entry as a config object; throws ConfigError for unknown names.
nlohmann::json library_entry(const std::string& name);

/// Reads and validates a config file. Parse and validation failures throw
/// ConfigError naming the offending field.
ProblemConfig load_problem(const std::string& path);
ProblemConfig parse_problem(const nlohmann::json& config);

/// Fully resolved config; parse_problem(to_json(c)) reproduces c.
nlohmann::json to_json(const ProblemConfig& config);

SeminormFamily build_family(const ProblemConfig& config);
Functional build_functional(const ProblemConfig& config);
Bornology build_bornology(const ProblemConfig& config, const SeminormFamily& family);
FinslerStructure build_structure(const ProblemConfig& config, const SeminormFamily& family);
/// "flat" or "manifold".
Setting build_setting(const ProblemConfig& config, const std::string& kind);

}  // namespace graded
