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

#include "graded/run.hpp"

#include <chrono>
#include <cmath>

#include "graded/error.hpp"

namespace graded {

using nlohmann::json;

namespace {

EVPConfig base_search(const ProblemConfig& c) {
  EVPConfig evp = c.search;
  evp.seed = c.seed;
  evp.inf_box = c.region;
  return evp;
}

DriverConfig driver_config(const ProblemConfig& c) {
  DriverConfig d;
  d.step.evp = base_search(c);
  d.step.scheme = c.difference;
  d.step.path = c.path;
  d.i_max = c.minimize.i_max;
  d.cluster_radius = c.minimize.cluster_radius;
  d.dual_tolerance = c.minimize.dual_tolerance;
  d.value_tolerance = c.minimize.value_tolerance;
  d.region = c.region;
  d.compat_options.grid = c.compat.grid;
  d.compat_options.near_pairs = c.compat.near_pairs;
  d.compat_options.path = c.path;
  d.predescent_rounds = c.minimize.predescent_rounds;
  d.seed = c.seed;
  return d;
}

CompatOptions compat_options(const ProblemConfig& c) {
  CompatOptions o;
  o.grid = c.compat.grid;
  o.near_pairs = c.compat.near_pairs;
  o.seed = c.seed ^ 0x5bd1e995ULL;
  o.path = c.path;
  return o;
}

json run_minimize(const ProblemConfig& c, RunReport& report) {
  const Setting setting = build_setting(c, c.minimize.setting);
  const Functional f = build_functional(c);
  const DriverResult r = minimizing_sequence_driver(f, setting, GradedPoint(c.space.id, c.start), driver_config(c));
  if (r.failure) report.error = "minimize: " + *r.failure;
  return to_json(r);
}

json run_ekeland(const ProblemConfig& c) {
  const SeminormFamily family = build_family(c);
  const Functional f = build_functional(c);
  const EkelandParams& p = c.ekeland;
  DistanceOracle sigma;
  std::string name = p.metric;
  if (p.metric == "graded") {
    sigma = [family](const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
      return graded_metric_of_difference(family, y - x);
    };
  } else if (p.metric == "seminorm") {
    family.check_index(p.n);
    const int n = p.n;
    sigma = [family, n](const Eigen::VectorXd& y, const Eigen::VectorXd& x) { return family(n, y - x); };
    name = "p_" + std::to_string(n);
  } else {
    const FinslerStructure S = build_structure(c, family);
    const PathOptions path = c.path;
    sigma = [S, path](const Eigen::VectorXd& y, const Eigen::VectorXd& x) { return finsler_metric(S, y, x, path); };
    name = "rho";
  }
  const EkelandWitness w = ekeland_search(f, sigma, GradedPoint(c.space.id, c.start), p.a, p.b, base_search(c), name);
  return {{"principle", "classical"},
          {"a", num(p.a)},
          {"b", num(p.b)},
          {"metric", name},
          {"ab", num(p.a * p.b)},
          {"distance_bound", num(1.0 / p.b)},
          {"witness", to_json(w)}};
}

json run_qiu(const ProblemConfig& c) {
  const SeminormFamily family = build_family(c);
  const Functional f = build_functional(c);
  const QiuParams& p = c.qiu;
  std::vector<double> lambdas = p.lambdas;
  if (lambdas.empty()) lambdas.assign(family.count(), std::sqrt(p.eta));
  const int index = p.index > 0 ? p.index : family.count();
  const EkelandWitness w = qiu_search(f, family, GradedPoint(c.space.id, c.start), p.eta, lambdas, index,
                                      base_search(c));
  json lj = json::array();
  for (double l : lambdas) lj.push_back(num(l));
  return {{"principle", "graded"}, {"eta", num(p.eta)}, {"lambdas", lj}, {"index", index}, {"witness", to_json(w)}};
}

json run_ps_check(const ProblemConfig& c) {
  const PSParams& p = c.ps_check;
  const Setting setting = build_setting(c, p.setting);
  const Functional f = build_functional(c);
  std::vector<SequenceGenerator> gens = library_generators(c.region.center(), c.seed);
  std::vector<std::string> notes;
  if (p.descent) {
    DriverConfig d = driver_config(c);
    d.i_max = p.horizon;
    const DriverResult r = minimizing_sequence_driver(f, setting, GradedPoint(c.space.id, c.start), d);
    if (r.failure || static_cast<int>(r.trace.size()) < p.horizon) {
      notes.push_back("descent sequence skipped: " + (r.failure ? *r.failure : std::string("short trace")));
    } else {
      std::vector<Eigen::VectorXd> points;
      for (const auto& s : r.trace) points.push_back(s.x);
      gens.push_back(trace_generator("descent", std::move(points)));
    }
  }
  PSMode mode;
  mode.at_level = p.mode == "PS_c";
  mode.level = p.level;
  json out = to_json(ps_check(f, setting, gens, mode, p.horizon, p.tolerances, c.difference));
  out["setting"] = setting.name();
  out["notes"] = notes;
  return out;
}

json run_metric(const ProblemConfig& c) {
  const SeminormFamily family = build_family(c);
  const FinslerStructure S = build_structure(c, family);
  const Eigen::VectorXd x = c.metric.x ? *c.metric.x : c.start;
  const Eigen::VectorXd y = c.metric.y ? *c.metric.y : c.region.center();
  if (x.size() != c.space.dim) throw ConfigError("metric.x", "expected " + std::to_string(c.space.dim) + " entries");
  if (y.size() != c.space.dim) throw ConfigError("metric.y", "expected " + std::to_string(c.space.dim) + " entries");
  json table = json::array();
  double rho = 0.0;
  for (int n = 1; n <= family.count(); ++n) {
    const PathResult path = pseudometric_path(S, x, y, n, c.path);
    rho += std::ldexp(1.0, -n) * path.length / (1.0 + path.length);
    json row = to_json(path);
    row["n"] = n;
    row["p_n_difference"] = num(family(n, x - y));
    table.push_back(row);
  }
  return {{"x", to_json(x)},
          {"y", to_json(y)},
          {"structure", S.rule_name()},
          {"chart", S.atlas().front().kind_name()},
          {"pseudometrics", table},
          {"rho", num(rho)},
          {"graded_metric", num(graded_metric_of_difference(family, x - y))}};
}

json run_compat(const ProblemConfig& c, RunReport& report) {
  const SeminormFamily family = build_family(c);
  const FinslerStructure S = build_structure(c, family);
  const Functional f = build_functional(c);
  const Chart& chart = S.atlas().front();
  const CompatibilityConstants consts = estimate_compatibility(S, chart, c.region, compat_options(c));
  AxiomOptions ao;
  ao.seed = c.seed;
  ao.path = c.path;
  const AxiomReport axioms = verify_finsler_axioms(S, chart, c.start, c.compat.K, ao);
  StepConfig sc;
  sc.evp = base_search(c);
  sc.scheme = c.difference;
  sc.path = c.path;
  json steps = json::array();
  int failures = 0;
  for (double theta : c.compat.thetas) {
    json row = {{"theta", num(theta)}, {"eps_theta", num(theta * theta * consts.beta / consts.alpha)}};
    try {
      row["certificate"] = to_json(manifold_min_step(f, S, theta, GradedPoint(c.space.id, c.start), consts, sc));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& err) {
      row["error"] = err.what();
      ++failures;
    }
    steps.push_back(row);
  }
  if (failures > 0) report.error = "compat: " + std::to_string(failures) + " theta step(s) failed";
  return {{"structure", S.rule_name()},
          {"compatibility", to_json(consts)},
          {"axioms", to_json(axioms)},
          {"steps", steps}};
}

json run_report(const ProblemConfig& c) {
  const SeminormFamily family = build_family(c);
  const Functional f = build_functional(c);
  const Bornology b = build_bornology(c, family);
  const FinslerStructure S = build_structure(c, family);
  C1Options c1 = c.c1;
  c1.seed = c.seed;
  c1.scheme = c.difference;
  const InfEstimate inf = estimate_inf(f, c.region, c.search.inf_samples, c.seed);
  const DifferentialRep L = differential(f, family, c.start, c.difference);
  Setting flat = Setting::flat(family, b);
  flat.path = c.path;
  Setting manifold = Setting::manifold(S);
  manifold.path = c.path;
  manifold.dual_resolution = c.bornology.resolution;
  json sets = json::array();
  for (const auto& s : b.sets()) sets.push_back(s.name);
  return {{"family",
           {{"space", family.space_id()},
            {"dim", family.dim()},
            {"count", family.count()},
            {"combine", to_string(family.combine())},
            {"rule", family.rule_name()},
            {"wrapped", family.wrapped()}}},
          {"bornology", to_json(validate_bornology(b, family))},
          {"catalog", sets},
          {"functional", {{"name", f.name}, {"analytic_gradient", f.has_gradient()}}},
          {"inf_estimate", to_json(inf)},
          {"c1", to_json(check_c1(f, family, c.region, c1))},
          {"chart", {{"kind", S.atlas().front().kind_name()}, {"roundtrip_error", claim(S.atlas().front().roundtrip_error(64, c.seed), 1e-10)}}},
          {"start",
           {{"x", to_json(c.start)},
            {"value", num(f(c.start))},
            {"flat_duals", to_json(flat.dual_norms(L, c.start))},
            {"finsler_duals", to_json(manifold.dual_norms(L, c.start))}}}};
}

}  // namespace

std::vector<std::string> commands() { return {"minimize", "ekeland", "qiu", "ps-check", "metric", "compat", "report"}; }

RunReport run(const std::string& command, const ProblemConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.command = command;
  report.config = to_json(config);
  try {
    if (command == "minimize")
      report.results = run_minimize(config, report);
    else if (command == "ekeland")
      report.results = run_ekeland(config);
    else if (command == "qiu")
      report.results = run_qiu(config);
    else if (command == "ps-check")
      report.results = run_ps_check(config);
    else if (command == "metric")
      report.results = run_metric(config);
    else if (command == "compat")
      report.results = run_compat(config, report);
    else if (command == "report")
      report.results = run_report(config);
    else
      throw ConfigError("command", "unknown command '" + command + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    report.error = command + ": " + err.what();
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace graded
