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
#include "graded/error.hpp"
#include "graded/finsler.hpp"
#include "graded/random.hpp"

using namespace graded;
using graded::testing::vec;

namespace {

SeminormFamily abs_family(int count = 1) {
  return SeminormFamily::from_table("F", SeminormCombine::Sup, Eigen::MatrixXd::Ones(count, 1));
}

}  // namespace

TEST_CASE("charts round-trip on their domains") {
  const Box box = Box::cube(2, 2.0);
  Eigen::MatrixXd A(2, 2);
  A << 2, 1,  //
      0, 1;
  for (const Chart& c : {Chart::identity("i", box), Chart::affine("a", box, A, vec({1, -1})),
                         Chart::sinh_warp("s", box, 1.5)}) {
    CHECK(c.roundtrip_error() <= 1e-10);
  }
  CHECK_THROWS(Chart::affine("bad", box, Eigen::MatrixXd::Zero(2, 2), vec({0, 0})));
}

TEST_CASE("finsler norm rules") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const FinslerStructure flat = FinslerStructure::flat(p, Box::cube(2, 3.0));
  const FinslerStructure conf = FinslerStructure::conformal(p, Box::cube(2, 3.0), 1.0);
  const Eigen::VectorXd v = vec({0.5, -1.0});
  CHECK(finsler_norm(flat, vec({1.0, 2.0}), v, 2) == p(2, v));
  CHECK(finsler_norm(conf, vec({0.0, 0.0}), v, 1) == p(1, v));
  CHECK(finsler_norm(conf, vec({1.0, 0.0}), v, 1) == doctest::Approx(2.0 * p(1, v)));
  CHECK(finsler_norm(conf, vec({1.0, 0.0}), vec({0, 0}), 2) == 0.0);
  CHECK_THROWS_AS(finsler_norm(flat, vec({9.0, 0.0}), v, 1), DomainError);
}

TEST_CASE("curve lengths") {
  const SeminormFamily p = abs_family();
  const FinslerStructure flat = FinslerStructure::flat(p, Box::cube(1, 3.0));
  const FinslerStructure conf = FinslerStructure::conformal(p, Box::cube(1, 3.0), 1.0);
  const Chart& chart = conf.atlas().front();
  CHECK(curve_length(flat, straight_curve(chart, vec({-1}), vec({2})), 1) == doctest::Approx(3.0));
  CHECK(curve_length(conf, straight_curve(chart, vec({0}), vec({1})), 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  const double coarse = curve_length(conf, straight_curve(chart, vec({-0.5}), vec({1.7}), 2), 1);
  const double fine = curve_length(conf, straight_curve(chart, vec({-0.5}), vec({1.7}), 9), 1);
  CHECK(std::abs(coarse - fine) <= 1e-10);
}

TEST_CASE("property: length is additive under concatenation") {
  Rng rng(3);
  const SeminormFamily p = testing::sup_family(2, 2);
  const FinslerStructure S = FinslerStructure::conformal(p, Box::cube(2, 2.0), 0.7);
  const Chart& chart = S.atlas().front();
  for (int k = 0; k < 30; ++k) {
    const Eigen::VectorXd a = rng.cube(2, 1.5), b = rng.cube(2, 1.5), c = rng.cube(2, 1.5);
    const double whole = curve_length(S, Curve{chart.id(), {a, b, c}}, 2);
    const double parts = segment_length(S, chart, a, b, 2) + segment_length(S, chart, b, c, 2);
    CHECK(std::abs(whole - parts) <= 1e-10 * (1 + whole));
  }
}

TEST_CASE("flat pseudometric is the seminorm of the difference") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(2, 3.0));
  const Eigen::VectorXd x = vec({0.3, -1.1}), y = vec({-0.4, 0.9});
  PathOptions forced;
  forced.force_optimize = true;
  for (int n = 1; n <= 2; ++n) {
    CHECK(pseudometric(S, x, y, n) == doctest::Approx(p(n, (x - y).eval())).epsilon(1e-12));
    CHECK(pseudometric(S, x, y, n, forced) == doctest::Approx(p(n, (x - y).eval())).epsilon(1e-9));
  }
  CHECK(pseudometric(S, x, x, 1) == 0.0);
  CHECK(finsler_metric(S, x, y) == doctest::Approx(graded_metric_of_difference(p, x - y)).epsilon(1e-12));
  CHECK(finsler_metric(S, x, x) == 0.0);
}

TEST_CASE("conformal pseudometric against a dense node budget") {
  const SeminormFamily p = abs_family();
  const FinslerStructure S = FinslerStructure::conformal(p, Box::cube(1, 3.0), 1.0);
  PathOptions dense;
  dense.nodes = 170;
  const double d = pseudometric(S, vec({0}), vec({1}), 1);
  const double oracle = pseudometric(S, vec({0}), vec({1}), 1, dense);
  CHECK(std::abs(d - oracle) <= 1e-4 * oracle);
  CHECK(d == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("property: optimized length never increases along the node ladder") {
  const SeminormFamily p = testing::sup_family(2, 1);
  const FinslerStructure S = FinslerStructure::conformal(p, Box::cube(2, 3.0), 2.0);
  const PathResult r = pseudometric_path(S, vec({-1.5, 0.5}), vec({1.5, 0.4}), 1);
  REQUIRE(r.ladder.size() >= 2);
  for (std::size_t k = 1; k < r.ladder.size(); ++k) CHECK(r.ladder[k] <= r.ladder[k - 1]);
  CHECK(r.optimized);
  // The curve bends away from the expensive centre line.
  const double straight = curve_length(S, straight_curve(S.atlas().front(), vec({-1.5, 0.5}), vec({1.5, 0.4})), 1);
  CHECK(r.length < straight);
}

TEST_CASE("property: rho symmetry and d^n triangle inequality on seeded points") {
  Rng rng(12);
  const SeminormFamily p = testing::sup_family(2, 2);
  const FinslerStructure S = FinslerStructure::conformal(p, Box::cube(2, 2.0), 1.0);
  PathOptions opt;
  opt.nodes = 9;
  for (int k = 0; k < 8; ++k) {
    const Eigen::VectorXd x = rng.cube(2, 1.5), y = rng.cube(2, 1.5), z = rng.cube(2, 1.5);
    CHECK(std::abs(finsler_metric(S, x, y, opt) - finsler_metric(S, y, x, opt)) <= 1e-9);
    const double dxz = pseudometric(S, x, z, 1, opt);
    const double dxy = pseudometric(S, x, y, 1, opt);
    const double dyz = pseudometric(S, y, z, 1, opt);
    CHECK(dxz <= dxy + dyz + 2e-6 * (1 + dxz));
  }
}

TEST_CASE("multi-chart pairs are rejected") {
  const SeminormFamily p = abs_family();
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 1.0));
  CHECK_THROWS_AS(pseudometric(S, vec({0.5}), vec({2.0}), 1), DomainError);
}

TEST_CASE("axiom verification") {
  const SeminormFamily p = testing::sup_family(1, 2);
  const FinslerStructure flat = FinslerStructure::flat(p, Box::cube(1, 2.0));
  for (double K : {1.0001, 1.5, 4.0}) {
    const AxiomReport r = verify_finsler_axioms(flat, flat.atlas().front(), vec({0.0}), K);
    CHECK(r.holds_everywhere);
    CHECK(r.worst_ratio == 1.0);
  }
  const FinslerStructure conf = FinslerStructure::conformal(p, Box::cube(1, 2.0), 1.0);
  const AxiomReport r = verify_finsler_axioms(conf, conf.atlas().front(), vec({0.0}), 1.1);
  CHECK(r.radius > 0.0);
  CHECK(r.worst_ratio <= 1.1);
  // c(x) / c(0) <= 1.1 means |x| <= sqrt(0.1); the radius is a rho-radius
  // below that point's distance.
  CHECK(r.radius <= finsler_metric(conf, vec({0.0}), vec({std::sqrt(0.1) + 1e-3})));
  const FinslerStructure steep = FinslerStructure::conformal(p, Box::cube(1, 2.0), 50.0);
  const AxiomReport s = verify_finsler_axioms(steep, steep.atlas().front(), vec({0.0}), 1.0001);
  CHECK(s.radius > 0.0);
  CHECK(s.radius < r.radius);
}

TEST_CASE("compatibility constants for a flat single-seminorm structure") {
  const SeminormFamily p = abs_family(2);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 2.0));
  const Box region = Box::cube(1, 0.5);
  const CompatibilityConstants c = estimate_compatibility(S, S.atlas().front(), region);
  CHECK(c.alpha >= 1.0 / 0.75 - 1e-9);  // rho = 0.75 p / (1 + p) at N = 2.
  CHECK(c.alpha <= c.beta);
  CHECK(c.beta / c.alpha <= 2.0 + 1e-9);
  const CompatibilityConstants half = estimate_compatibility(S, S.atlas().front(), Box::cube(1, 0.25));
  CHECK(half.beta / half.alpha <= c.beta / c.alpha + 1e-12);
}

TEST_CASE("compatibility on a degenerate region fails") {
  const SeminormFamily p = abs_family();
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 2.0));
  CHECK_THROWS(estimate_compatibility(S, S.atlas().front(), Box{vec({0.5}), vec({0.5})}));
}

TEST_CASE("dual finsler norms") {
  const SeminormFamily p1 = abs_family();
  const FinslerStructure S1 = FinslerStructure::flat(p1, Box::cube(1, 2.0));
  CHECK(dual_finsler_norm(S1, DifferentialRep{"F", vec({-2.5}), vec({0})}, vec({0}), 1).value ==
        doctest::Approx(2.5));
  CHECK(dual_finsler_norm(S1, DifferentialRep{"F", vec({0.0}), vec({0})}, vec({0}), 1).value == 0.0);

  Eigen::MatrixXd w(1, 2);
  w << 1, 2;
  const SeminormFamily p2 = SeminormFamily::from_table("F", SeminormCombine::Sup, w);
  const FinslerStructure S2 = FinslerStructure::flat(p2, Box::cube(2, 2.0));
  const DifferentialRep L{"F", vec({1, 1}), vec({0, 0})};
  const double v = dual_finsler_norm(S2, L, vec({0, 0}), 1).value;
  CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(dual_finsler_norm(S2, L.scaled(-4.0), vec({0, 0}), 1).value == doctest::Approx(4.0 * v).epsilon(1e-14));
}

TEST_CASE("dual finsler norm flags kernel directions") {
  Eigen::MatrixXd w(1, 2);
  w << 1, 0;
  const SeminormFamily p = SeminormFamily::from_table("F", SeminormCombine::Sup, w);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(2, 2.0));
  const DualNormResult r = dual_finsler_norm(S, DifferentialRep{"F", vec({0, 1}), vec({0, 0})}, vec({0, 0}), 1);
  CHECK(r.infinite);
  CHECK(r.degenerate_directions > 0);
  const DualNormResult ok = dual_finsler_norm(S, DifferentialRep{"F", vec({3, 0}), vec({0, 0})}, vec({0, 0}), 1);
  CHECK_FALSE(ok.infinite);
  CHECK(ok.value == doctest::Approx(3.0));
}
