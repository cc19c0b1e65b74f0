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
#include "graded/bornology.hpp"
#include "graded/calculus.hpp"
#include "graded/error.hpp"
#include "graded/expression.hpp"
#include "graded/random.hpp"

using namespace graded;
using graded::testing::vec;

namespace {

Functional from_expression(const std::string& text, int dim) {
  const Expression e = Expression::parse(text, dim);
  Functional f;
  f.name = text;
  f.space_id = "F";
  f.dim = dim;
  f.eval = [e](const Eigen::VectorXd& x) { return e(x); };
  return f;
}

}  // namespace

TEST_CASE("gateaux derivatives of simple functionals") {
  const SeminormFamily p = testing::sup_family(2, 1);
  const Functional q = testing::quadratic(vec({1, 1}));
  CHECK(gateaux_derivative(q, p, vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(gateaux_derivative(q, p, vec({1, 2}), vec({1, 0})) == doctest::Approx(2.0).epsilon(1e-10));
  const SeminormFamily p1 = testing::sup_family(1, 1);
  CHECK(gateaux_derivative(testing::arctan0(1), p1, vec({0}), vec({1})) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("differential values") {
  const SeminormFamily p = testing::sup_family(2, 1);
  const DifferentialRep L = differential(testing::quadratic(vec({1, 2})), p, vec({1, 1}));
  CHECK(L.basis_values[0] == doctest::Approx(2.0));
  CHECK(L.basis_values[1] == doctest::Approx(4.0));
  CHECK(differential(testing::constant(2, 3.0), p, vec({0.5, 0.5})).basis_values.norm() == 0.0);
  const DifferentialRep B = differential(from_expression("x0*x1", 2), p, vec({3, 5}));
  CHECK(B.basis_values[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(B.basis_values[1] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("differential rejects points of another space") {
  const SeminormFamily p = testing::sup_family(1, 1);
  CHECK_THROWS_AS(differential(testing::quadratic(vec({1})), p, GradedPoint("G", vec({1}))), SpaceMismatch);
}

TEST_CASE("non-finite values near x are reported") {
  const SeminormFamily p = testing::sup_family(1, 1);
  const Functional f = from_expression("log(x0)", 1);
  CHECK_THROWS_AS(gateaux_derivative(f, p, vec({0.0}), vec({1.0})), NumericalError);
}

TEST_CASE("prefer analytic uses the closed form") {
  const SeminormFamily p = testing::sup_family(1, 1);
  DifferenceScheme s;
  s.prefer_analytic = true;
  const Functional q = testing::quadratic(vec({3}));
  CHECK(gateaux_derivative(q, p, vec({0.25}), vec({2.0}), s) == 3.0);
}

TEST_CASE("property: linearity of the derivative in h") {
  Rng rng(5);
  const SeminormFamily p = testing::sup_family(3, 2);
  const Functional f = from_expression("sin(x0)*x1 + exp(0.3*x2) + x0^2*x2", 3);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd x = rng.cube(3, 1.0), h1 = rng.cube(3, 1.0), h2 = rng.cube(3, 1.0);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double lhs = gateaux_derivative(f, p, x, (a * h1 + b * h2).eval());
    const double rhs = a * gateaux_derivative(f, p, x, h1) + b * gateaux_derivative(f, p, x, h2);
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("property: halving the base step barely moves polynomial derivatives") {
  Rng rng(6);
  const SeminormFamily p = testing::sup_family(2, 1);
  const Functional f = from_expression("x0^3 - 2*x0*x1^2 + 4*x1", 2);
  DifferenceScheme half;
  half.base_step = 0.5e-4;
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd x = rng.cube(2, 2.0), h = rng.cube(2, 1.0);
    CHECK(std::abs(gateaux_derivative(f, p, x, h) - gateaux_derivative(f, p, x, h, half)) <= 1e-8);
  }
}

TEST_CASE("dual seminorm examples") {
  Eigen::MatrixXd w(1, 2);
  w << 1, 2;
  const SeminormFamily p = SeminormFamily::from_table("F", SeminormCombine::Sup, w);
  const Bornology b = surrogate_bornology(p);
  DifferentialRep L{"F", vec({1, 0}), vec({0, 0})};
  CHECK(dual_seminorm(L, b, "sphere_1", 1) == doctest::Approx(1.0).epsilon(1e-12));
  const DifferentialRep zero{"F", vec({0, 0}), vec({0, 0})};
  CHECK(dual_seminorm(zero, b, "union", 1) == 0.0);
  CHECK(dual_seminorm(L.scaled(-3.0), b, "sphere_1", 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(dual_seminorm(L, b, "missing", 1), DomainError);
}

TEST_CASE("property: dual seminorm subadditive and monotone under inclusion") {
  Rng rng(8);
  const SeminormFamily p = testing::sup_family(2, 2);
  const Bornology b = surrogate_bornology(p);
  for (int k = 0; k < 100; ++k) {
    const DifferentialRep L1{"F", rng.cube(2, 3.0), vec({0, 0})};
    const DifferentialRep L2{"F", rng.cube(2, 3.0), vec({0, 0})};
    const DifferentialRep S{"F", L1.basis_values + L2.basis_values, vec({0, 0})};
    for (const auto& set : b.sets()) {
      CHECK(dual_seminorm(S, b, set.name, 1) <= dual_seminorm(L1, b, set.name, 1) + dual_seminorm(L2, b, set.name, 1) + 1e-12);
    }
    // sphere_1 is contained in the union, which is contained in union@2.
    CHECK(dual_seminorm(L1, b, "sphere_1", 1) <= dual_seminorm(L1, b, "union", 1));
    CHECK(dual_seminorm(L1, b, "union", 1) <= dual_seminorm(L1, b, "union@2", 1));
  }
}

TEST_CASE("dual resolution self-test converges") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const DifferentialRep L{"F", vec({0.7, -1.3}), vec({0, 0})};
  const ResolutionCheck r = dual_resolution_check(L, p, 2, default_resolution(2));
  CHECK(r.converged);
  CHECK(r.doubled_resolution > r.resolution);
}

TEST_CASE("check_c1 on smooth, kinked and constant functionals") {
  const SeminormFamily p = testing::sup_family(1, 1);
  const Box region = Box::cube(1, 1.0);
  const C1Report smooth = check_c1(testing::quadratic(vec({1})), p, region);
  CHECK(smooth.pass);
  REQUIRE(smooth.levels.size() == 3);
  CHECK(smooth.levels.back().jump < smooth.levels.front().jump);

  Functional kink = from_expression("abs(x0)", 1);
  const C1Report k = check_c1(kink, p, region);
  CHECK_FALSE(k.pass);
  CHECK(k.worst_jump == doctest::Approx(2.0).epsilon(0.05));

  const C1Report c = check_c1(testing::constant(1, 4.0), p, region);
  CHECK(c.pass);
  CHECK(c.worst_jump == 0.0);
}
