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

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "graded/ekeland.hpp"
#include "graded/error.hpp"
#include "graded/random.hpp"

using namespace graded;
using graded::testing::vec;

namespace {

const DistanceOracle kAbs = [](const Eigen::VectorXd& y, const Eigen::VectorXd& x) { return (y - x).cwiseAbs().maxCoeff(); };

GridSpec line_grid(double lo, double hi, int points, double offset = 0.0) {
  GridSpec g;
  g.box = Box{vec({lo}), vec({hi})};
  g.per_axis = points;
  g.offset = offset;
  return g;
}

}  // namespace

TEST_CASE("x squared from 1 with a = 2, b = 1") {
  const Functional f = testing::quadratic(vec({1}));
  const EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", vec({1.0})), 2.0, 1.0);
  CHECK(w.valid);
  CHECK(w.status == SearchStatus::Converged);
  const double z = w.point.coords()[0];
  CHECK(z >= 0.0);
  CHECK(z <= 1.0);
  CHECK(std::abs(z - 1.0) <= 1.0);
  const PenaltySpec pen = PenaltySpec::ekeland(kAbs, 2.0, 1.0);
  const VerificationReport r = verify_witness(f, w, pen, line_grid(-3.0, 3.0, 10000));
  CHECK(r.valid);
  CHECK(r.grid_points == 10000);
  CHECK(r.conclusions[2].margin > 0.0);
}

TEST_CASE("constant functional keeps the start") {
  const Functional f = testing::constant(2, 1.5);
  const EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", vec({0.2, -0.3})), 2.0, 1.0);
  CHECK(w.valid);
  CHECK(w.point.coords() == vec({0.2, -0.3}));
}

TEST_CASE("a minimizer is its own witness") {
  const Functional f = testing::quadratic(vec({1}));
  const EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", vec({0.0})), 2.0, 1.0);
  CHECK(w.valid);
  CHECK(w.point.coords()[0] == 0.0);
  const VerificationReport r = verify_witness(f, w, PenaltySpec::ekeland(kAbs, 2.0, 1.0), line_grid(-3, 3, 999));
  CHECK(r.valid);
}

TEST_CASE("perturbed witness fails verification") {
  const Functional f = testing::quadratic(vec({1}));
  EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", vec({1.0})), 2.0, 1.0);
  const double z = w.point.coords()[0];
  w.point = GradedPoint("F", vec({z + 0.5}));
  w.value = f(w.point.coords());
  const VerificationReport r = verify_witness(f, w, PenaltySpec::ekeland(kAbs, 2.0, 1.0), line_grid(-3, 3, 10000));
  CHECK_FALSE(r.valid);
  CHECK(r.min_margin < 0.0);
}

TEST_CASE("preconditions") {
  const Functional f = testing::quadratic(vec({1}));
  CHECK_THROWS_AS(ekeland_search(f, kAbs, GradedPoint("F", vec({1.0})), 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(ekeland_search(f, kAbs, GradedPoint("F", vec({1.0})), 2.0, 0.0), PreconditionError);
  // f(2) = 4 > inf + a.
  CHECK_THROWS_AS(ekeland_search(f, kAbs, GradedPoint("F", vec({2.0})), 2.0, 1.0), PreconditionError);
  EVPConfig bad;
  bad.shrink = 1.5;
  CHECK_THROWS_AS(ekeland_search(f, kAbs, GradedPoint("F", vec({1.0})), 2.0, 1.0, bad), ConfigError);
}

TEST_CASE("descent past the floor is reported as unbounded below") {
  Functional f;
  f.name = "linear";
  f.space_id = "F";
  f.dim = 1;
  f.eval = [](const Eigen::VectorXd& x) { return x[0]; };
  const SeminormFamily p = SeminormFamily::from_table("F", SeminormCombine::Sup, Eigen::MatrixXd::Ones(2, 1));
  const DistanceOracle d = [p](const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
    return graded_metric_of_difference(p, y - x);
  };
  EVPConfig cfg;
  cfg.inf_estimate = -1.0;
  cfg.floor = -0.5;
  CHECK_THROWS_AS(ekeland_search(f, d, GradedPoint("F", vec({0.0})), 2.0, 1.0, cfg), UnboundedBelow);
}

TEST_CASE("budget exhaustion is a status, not an error") {
  const Functional f = testing::quadratic(vec({1, 2}), vec({0.3, -0.2}));
  EVPConfig cfg;
  cfg.max_iterations = 1;
  cfg.polish = false;
  const EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", vec({1.0, 0.5})), 2.0, 1.0, cfg);
  CHECK(w.status == SearchStatus::BudgetExhausted);
  CHECK_FALSE(w.valid);
}

TEST_CASE("property: descent invariant holds along every trace") {
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const int dim = 1 + k % 3;
    const Functional f = testing::quadratic(Eigen::VectorXd::Constant(dim, 1.0) + rng.cube(dim, 0.5).cwiseAbs(),
                                            rng.cube(dim, 0.5));
    const double a = 2.0, b = rng.uniform(0.5, 2.0);
    Eigen::VectorXd x = rng.cube(dim, 0.6);
    EVPConfig cfg;
    cfg.seed = 100 + k;
    const EkelandWitness w = ekeland_search(f, kAbs, GradedPoint("F", x), a, b, cfg);
    double prev = w.start_value;
    for (const auto& t : w.trace) {
      CHECK(t.previous == prev);
      CHECK(t.value <= t.previous);
      CHECK(t.value + t.penalty <= t.previous);
      prev = t.value;
    }
    CHECK(w.value == prev);
  }
}

TEST_CASE("property: doubling the inner budget never worsens the result") {
  Rng rng(41);
  for (int k = 0; k < 20; ++k) {
    const int dim = 1 + k % 4;
    const Functional f = testing::quadratic(Eigen::VectorXd::Constant(dim, 1.5), rng.cube(dim, 0.5));
    const Eigen::VectorXd x = rng.cube(dim, 0.5);
    EVPConfig small;
    small.polish = false;
    small.seed = 7 + k;
    small.inner_max = 8;
    EVPConfig large = small;
    large.inner_max = 16;
    const double fs = ekeland_search(f, kAbs, GradedPoint("F", x), 2.0, 1.0, small).value;
    const double fl = ekeland_search(f, kAbs, GradedPoint("F", x), 2.0, 1.0, large).value;
    CHECK(fl <= fs + 1e-12);
  }
}

TEST_CASE("graded witness on a quadratic with eta = 0.04, lambda = 0.2") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const Functional f = testing::quadratic(vec({2, 3}));
  const Eigen::VectorXd x0 = vec({0.1, 0.05});
  const std::vector<double> lambdas{0.2, 0.2};
  const EkelandWitness w = qiu_search(f, p, GradedPoint("F", x0), 0.04, lambdas, 2);
  CHECK(w.valid);
  const Eigen::VectorXd z = w.point.coords();
  for (int j = 1; j <= 2; ++j) {
    CHECK(p(j, (z - x0).eval()) < 0.2);
    CHECK(0.2 * p(j, (z - x0).eval()) <= f(x0) - f(z));
  }
  const PenaltySpec pen = PenaltySpec::qiu(p, 0.04, lambdas, 2);
  const VerificationReport r = verify_witness(f, w, pen, GridSpec::around(z, 1.0, 10000, 0.5));
  CHECK(r.valid);
  CHECK(r.grid_points == 10000);
}

TEST_CASE("graded witness at the global minimizer") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const Functional f = testing::quadratic(vec({2, 3}));
  const EkelandWitness w = qiu_search(f, p, GradedPoint("F", vec({0, 0})), 0.04, {0.2, 0.2}, 2);
  CHECK(w.valid);
  CHECK(w.point.coords() == vec({0, 0}));
  CHECK(w.verification.conclusions[0].margin == 0.0);
}

TEST_CASE("graded distance bound scales with eta") {
  const SeminormFamily p = testing::sup_family(1, 2);
  const Functional f = testing::quadratic(vec({1}));
  const PenaltySpec full = PenaltySpec::qiu(p, 0.04, {0.2, 0.2}, 2);
  const PenaltySpec half = PenaltySpec::qiu(p, 0.02, {0.2, 0.2}, 2);
  // Conclusion-(2) margin at z = x0 is eta / lambda minus zero.
  const Eigen::VectorXd x0 = vec({0.1});
  CHECK(full.anchor_margins(f(x0), f(x0), x0, x0)[1] == doctest::Approx(0.2));
  CHECK(half.anchor_margins(f(x0), f(x0), x0, x0)[1] == doctest::Approx(0.1));
}

TEST_CASE("property: graded distance bound holds strictly for valid witnesses") {
  Rng rng(53);
  for (int k = 0; k < 20; ++k) {
    const int dim = 1 + k % 3;
    const SeminormFamily p = testing::sup_family(dim, 3);
    const Eigen::VectorXd c = rng.cube(dim, 0.3);
    const Functional f = testing::quadratic(Eigen::VectorXd::Constant(dim, 2.0), c);
    const double eta = rng.uniform(0.05, 0.5);
    Eigen::VectorXd x0 = c + rng.cube(dim, 0.3);
    while (f(x0) > eta) x0 = c + 0.5 * (x0 - c);
    const std::vector<double> lambdas(3, std::sqrt(eta));
    const int i = 1 + k % 3;
    EVPConfig cfg;
    cfg.seed = 9 + k;
    const EkelandWitness w = qiu_search(f, p, GradedPoint("F", x0), eta, lambdas, i, cfg);
    REQUIRE(w.valid);
    for (int j = 1; j <= i; ++j) CHECK(p(j, (w.point.coords() - x0).eval()) < eta / lambdas[j - 1]);
  }
}

TEST_CASE("inf estimate uses the lower bound and samples") {
  const Functional f = testing::quadratic(vec({1}), vec({0.5}));
  const InfEstimate e = estimate_inf(f, Box::cube(1, 1.0), 64, 3);
  CHECK(e.value == 0.0);
  Functional g = f;
  g.lower_bound.reset();
  const InfEstimate s = estimate_inf(g, Box::cube(1, 1.0), 64, 3);
  CHECK(s.value >= 0.0);
  CHECK(s.value < 0.05);
  CHECK(s.samples == 64);
}

TEST_CASE("grid spec layout") {
  const GridSpec g = GridSpec::around(vec({0, 0}), 1.0, 100);
  CHECK(g.per_axis == 10);
  CHECK(g.size() == 100);
  CHECK(g.point(0) == vec({-1, -1}));
}
