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
#include "graded/error.hpp"
#include "graded/psmin.hpp"

using namespace graded;
using graded::testing::vec;

namespace {

const DistanceOracle kSup = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
};

std::vector<Eigen::VectorXd> take(const SequenceGenerator& g, int n) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 1; i <= n; ++i) out.push_back(g.rule(i));
  return out;
}

Setting flat_setting(int dim, int count) {
  const SeminormFamily p = testing::sup_family(dim, count);
  return Setting::flat(p, surrogate_bornology(p));
}

CompatibilityConstants constants(double alpha, double beta, int dim = 1) {
  return {"chart0", alpha, beta, Box::cube(dim, 2.0), 1};
}

}  // namespace

TEST_CASE("cluster points of simple sequences") {
  const auto conv = take(shrinking_generator("s", vec({0.0}), vec({1.0})), 32);
  const auto c = cluster_point(conv, kSup, 0.05);
  REQUIRE(c);
  CHECK(std::abs((*c)[0]) <= 0.05);
  CHECK_FALSE(cluster_point(take(escaping_generator("e", vec({0.0}), 0, 1.0), 32), kSup, 0.05));
  std::vector<Eigen::VectorXd> alt;
  for (int i = 0; i < 32; ++i) alt.push_back(i % 2 ? vec({3.0}) : vec({-1.0}));
  const auto two = cluster_point(alt, kSup, 0.05);
  REQUIRE(two);
  CHECK((*two)[0] == -1.0);
  CHECK_THROWS_AS(cluster_point(std::vector<Eigen::VectorXd>(8, vec({0.0})), kSup, 0.05), PreconditionError);
}

TEST_CASE("arctan escaping sequence fails PS at the sup level") {
  const Setting s = flat_setting(1, 2);
  const std::vector<SequenceGenerator> gens{escaping_generator("to-infinity", vec({0.0}), 0, 1.0)};
  const PSReport r = ps_check(testing::arctan0(1), s, gens, PSMode{true, M_PI / 2}, 64);
  CHECK_FALSE(r.pass);
  CHECK(r.failing_sequence == "to-infinity");
  REQUIRE(r.sequences.size() == 1);
  CHECK(r.sequences[0].qualifying);
  CHECK_FALSE(r.sequences[0].cluster);
}

TEST_CASE("coercive quadratic passes on the library generators") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Setting s = flat_setting(dim, 2);
    const Functional f = testing::quadratic(Eigen::VectorXd::LinSpaced(dim, 2.0, 4.0));
    const PSReport r = ps_check(f, s, library_generators(Eigen::VectorXd::Zero(dim), 3), PSMode{}, 64);
    CHECK(r.pass);
    for (const auto& v : r.sequences) {
      if (v.kind == "escaping") CHECK_FALSE(v.qualifying);
      if (v.qualifying) CHECK(v.cluster);
    }
  }
}

TEST_CASE("unbounded values are excluded from the verdict") {
  const Setting s = flat_setting(1, 1);
  Functional f = testing::quadratic(vec({1}));
  const PSReport r = ps_check(f, s, {escaping_generator("up", vec({0.0}), 0, 1.0)}, PSMode{}, 32);
  CHECK_FALSE(r.sequences[0].bounded);
  CHECK_FALSE(r.sequences[0].qualifying);
  CHECK(r.pass);
  CHECK(r.qualifying == 0);
}

TEST_CASE("manifold step on x squared, theta = 1.1, (alpha, beta) = (1, 2)") {
  const SeminormFamily p = testing::sup_family(1, 1);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 2.0));
  const Functional f = testing::quadratic(vec({1}));
  const CriticalCertificate c = manifold_min_step(f, S, 1.1, GradedPoint("F", vec({0.5})), constants(1, 2));
  CHECK(c.bound == doctest::Approx(2.42));
  const double z = c.point.coords()[0];
  for (const auto& d : c.dual_bounds) {
    CHECK(d.value == doctest::Approx(std::abs(2.0 * z)).epsilon(1e-6));
    CHECK(d.value <= 2.42);
    CHECK(d.pass);
  }
  CHECK(c.value <= f(vec({0.5})));
}

TEST_CASE("manifold step at the minimizer stays put") {
  const SeminormFamily p = testing::sup_family(1, 2);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 2.0));
  const CriticalCertificate c =
      manifold_min_step(testing::quadratic(vec({1})), S, 1.5, GradedPoint("F", vec({0.0})), constants(1, 2));
  CHECK(c.point.coords()[0] == 0.0);
  for (const auto& d : c.dual_bounds) CHECK(d.value <= 1e-9);
}

TEST_CASE("property: theta bound decreases toward beta / alpha") {
  const SeminormFamily p = testing::sup_family(1, 1);
  const FinslerStructure S = FinslerStructure::flat(p, Box::cube(1, 2.0));
  const Functional f = testing::quadratic(vec({1}));
  double last = INFINITY;
  for (double theta : {3.0, 2.0, 1.5, 1.1, 1.01, 1.001}) {
    const CriticalCertificate c = manifold_min_step(f, S, theta, GradedPoint("F", vec({0.5})), constants(1, 2));
    CHECK(c.bound < last);
    CHECK(c.bound > 2.0);
    last = c.bound;
  }
  CHECK(last == doctest::Approx(2.0).epsilon(1e-2));
  CHECK_THROWS_AS(manifold_min_step(f, S, 1.0, GradedPoint("F", vec({0.5})), constants(1, 2)), PreconditionError);
  CHECK_THROWS_AS(manifold_min_step(f, S, 1.5, GradedPoint("F", vec({0.5})), constants(2, 1)), PreconditionError);
}

TEST_CASE("frechet step on a quadratic with eps = 0.01") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const Bornology b = surrogate_bornology(p);
  const Functional f = testing::quadratic(vec({1, 2}));
  // f(x) = 0.009.
  const Eigen::VectorXd x = vec({std::sqrt(0.009), 0.0});
  const CriticalCertificate c = frechet_min_step(f, p, b, 0.01, GradedPoint("F", x), 2);
  CHECK(c.duals_ok);
  for (const auto& d : c.dual_bounds) CHECK(d.value <= 0.1 + 1e-6);
  const Eigen::VectorXd z = c.point.coords();
  for (int j = 1; j <= 2; ++j) {
    CHECK(p(j, (z - x).eval()) < 0.1);
    CHECK(p(j, (z - x).eval()) <= (f(x) - f(z)) / 0.1 + 1e-12);
  }
}

TEST_CASE("frechet step at the minimizer and eps scaling") {
  const SeminormFamily p = testing::sup_family(1, 2);
  const Bornology b = surrogate_bornology(p);
  const Functional f = testing::quadratic(vec({1}));
  const CriticalCertificate c = frechet_min_step(f, p, b, 0.5, GradedPoint("F", vec({0.0})), 2);
  CHECK(c.point.coords()[0] == 0.0);
  CHECK(c.in_critical_set);
  const CriticalCertificate big = frechet_min_step(f, p, b, 1.0, GradedPoint("F", vec({0.0})), 2);
  const CriticalCertificate small = frechet_min_step(f, p, b, 0.01, GradedPoint("F", vec({0.0})), 2);
  const double r_big = big.witness->verification.conclusions[1].margin;
  const double r_small = small.witness->verification.conclusions[1].margin;
  CHECK(r_big == doctest::Approx(10.0 * r_small));
}

TEST_CASE("certificates replay from stored points") {
  const SeminormFamily p = testing::sup_family(2, 2);
  const Bornology b = surrogate_bornology(p);
  const Functional f = testing::quadratic(vec({1, 3}), vec({0.2, 0.1}));
  const CriticalCertificate c = frechet_min_step(f, p, b, 0.1, GradedPoint("F", vec({0.35, 0.2})), 2);
  CHECK(std::abs(f(c.point.coords()) - c.value) <= 1e-9);
  const DifferentialRep L = differential(f, p, c.point.coords());
  for (const auto& d : c.dual_bounds) CHECK(std::abs(cloud_sup(L, b.find(d.set).points) - d.value) <= 1e-9);
}

TEST_CASE("driver on a three-dimensional quadratic") {
  const Setting s = flat_setting(3, 2);
  const Functional f = testing::quadratic(vec({2, 3, 4}));
  DriverConfig cfg;
  cfg.region = Box::cube(3, 2.0);
  const DriverResult r = minimizing_sequence_driver(f, s, GradedPoint("F", vec({0.7, 0.05, 0.02})), cfg);
  CHECK_FALSE(r.failure);
  REQUIRE(r.cluster);
  CHECK(s.distance(*r.cluster, Eigen::VectorXd::Zero(3)) <= 1e-3);
  REQUIRE(r.certificate);
  CHECK(r.certificate->in_critical_set);
  for (const auto& d : r.certificate->dual_bounds) CHECK(d.value <= 1e-2);
  for (const auto& step : r.trace) CHECK(step.value <= step.inf_estimate + 1.0 / step.i);
}

TEST_CASE("driver on arctan reports a PS failure") {
  const Setting s = flat_setting(1, 2);
  DriverConfig cfg;
  cfg.region = Box::cube(1, 4.0);
  cfg.i_max = 40;
  const DriverResult r = minimizing_sequence_driver(testing::arctan0(1), s, GradedPoint("F", vec({0.0})), cfg);
  CHECK_FALSE(r.failure);
  CHECK(r.ps_failure);
  CHECK_FALSE(r.cluster);
  CHECK(r.trace.back().x[0] < r.trace.front().x[0]);
}

TEST_CASE("driver on a constant functional stays at the start") {
  const Setting s = flat_setting(2, 2);
  DriverConfig cfg;
  cfg.i_max = 16;
  const DriverResult r = minimizing_sequence_driver(testing::constant(2, 1.0), s, GradedPoint("F", vec({0.3, 0.4})), cfg);
  REQUIRE(r.cluster);
  CHECK(*r.cluster == vec({0.3, 0.4}));
  for (const auto& d : r.certificate->dual_bounds) CHECK(d.value == 0.0);
}

TEST_CASE("manifold driver on a conformal structure") {
  const SeminormFamily p = testing::sup_family(1, 2);
  const Setting s = Setting::manifold(FinslerStructure::conformal(p, Box::cube(1, 3.0), 1.0));
  DriverConfig cfg;
  cfg.region = Box::cube(1, 3.0);
  cfg.i_max = 24;
  const DriverResult r =
      minimizing_sequence_driver(testing::quadratic(vec({1}), vec({1.0})), s, GradedPoint("F", vec({0.5})), cfg);
  CHECK_FALSE(r.failure);
  REQUIRE(r.cluster);
  // Outside the first-step basin the iterates approach 1 at the 1/sqrt(i)
  // rate set by theta, so only a loose bound is expected here.
  CHECK((*r.cluster)[0] > 0.5);
  CHECK((*r.cluster)[0] < 1.0 + 1e-9);
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].value <= r.trace[k - 1].value);
  for (const auto& step : r.trace) CHECK(step.within_level);
  REQUIRE(r.compat);
  CHECK(r.compat->alpha <= r.compat->beta);
}
