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

#include "graded/psmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graded/error.hpp"
#include "graded/parallel.hpp"
#include "graded/random.hpp"

namespace graded {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

CriticalCertificate certificate(std::string kind, std::string parameter_name, double parameter, GradedPoint point,
                                Eigen::VectorXd start, double value, double level, std::string level_source) {
  CriticalCertificate c{std::move(kind), std::move(parameter_name), parameter, std::move(point), std::move(start),
                        value, level, std::move(level_source), 0.0, 0.0, false, 0.0, {}, {}, false, false,
                        std::nullopt, {}};
  c.value_gap = value - level;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Settings and generators

Setting Setting::flat(SeminormFamily family, Bornology bornology) {
  if (bornology.space_id() != family.space_id()) throw SpaceMismatch(family.space_id(), bornology.space_id());
  Setting s(std::move(family));
  s.bornology_ = std::move(bornology);
  return s;
}

Setting Setting::manifold(FinslerStructure structure) {
  Setting s(structure.family());
  s.structure_ = std::move(structure);
  return s;
}

const Bornology& Setting::bornology() const {
  if (!bornology_) throw DomainError("manifold setting has no bornology");
  return *bornology_;
}

const FinslerStructure& Setting::structure() const {
  if (!structure_) throw DomainError("flat setting has no Finsler structure");
  return *structure_;
}

double Setting::distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (structure_) return finsler_metric(*structure_, x, y, path);
  return graded_metric_of_difference(family_, x - y);
}

Eigen::VectorXd Setting::dual_norms(const DifferentialRep& L, const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(family_.count());
  for (int n = 1; n <= family_.count(); ++n) {
    if (structure_) {
      const DualNormResult r = dual_finsler_norm(*structure_, L, x, n, dual_resolution);
      out[n - 1] = r.infinite ? kInfinity : r.value;
    } else {
      double best = 0.0;
      for (const auto& set : bornology_->sets()) best = std::max(best, cloud_sup(L, set.points));
      out[n - 1] = best;
    }
  }
  return out;
}

SequenceGenerator shrinking_generator(std::string name, Eigen::VectorXd p, Eigen::VectorXd u) {
  return {std::move(name), "shrinking", [p = std::move(p), u = std::move(u)](int i) -> Eigen::VectorXd {
            return p + u / static_cast<double>(i);
          }};
}

SequenceGenerator escaping_generator(std::string name, Eigen::VectorXd base, int axis, double sign) {
  if (axis < 0 || axis >= base.size()) throw DomainError("escaping axis outside dimension");
  return {std::move(name), "escaping", [base = std::move(base), axis, sign](int i) -> Eigen::VectorXd {
            Eigen::VectorXd x = base;
            x[axis] += sign * static_cast<double>(i);
            return x;
          }};
}

SequenceGenerator oscillating_generator(std::string name, Eigen::VectorXd a, Eigen::VectorXd b, Eigen::VectorXd u) {
  return {std::move(name), "oscillating",
          [a = std::move(a), b = std::move(b), u = std::move(u)](int i) -> Eigen::VectorXd {
            return (i % 2 == 1 ? a : b) + u / static_cast<double>(i);
          }};
}

SequenceGenerator trace_generator(std::string name, std::vector<Eigen::VectorXd> points) {
  if (points.empty()) throw DomainError("trace generator needs at least one point");
  return {std::move(name), "descent", [points = std::move(points)](int i) -> Eigen::VectorXd {
            const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(i, 1) - 1), points.size() - 1);
            return points[idx];
          }};
}

std::vector<SequenceGenerator> library_generators(const Eigen::VectorXd& center, std::uint64_t seed) {
  Rng rng(seed);
  const auto dim = center.size();
  std::vector<SequenceGenerator> gens;
  gens.push_back(shrinking_generator("shrink-center", center, rng.cube(dim, 1.0)));
  const Eigen::VectorXd p = center + rng.cube(dim, 0.5);
  gens.push_back(shrinking_generator("shrink-offset", p, rng.cube(dim, 1.0)));
  const Eigen::VectorXd base = center + rng.cube(dim, 0.5);
  for (Eigen::Index k = 0; k < dim; ++k) {
    gens.push_back(escaping_generator("escape+" + std::to_string(k), base, static_cast<int>(k), 1.0));
    gens.push_back(escaping_generator("escape-" + std::to_string(k), base, static_cast<int>(k), -1.0));
  }
  const Eigen::VectorXd a = center + rng.cube(dim, 0.5);
  const Eigen::VectorXd b = center + rng.cube(dim, 0.5);
  gens.push_back(oscillating_generator("oscillate", a, b, rng.cube(dim, 0.1)));
  return gens;
}

// ---------------------------------------------------------------------------
// Cluster detection and PS checks

std::optional<Eigen::VectorXd> cluster_point(const std::vector<Eigen::VectorXd>& seq, const DistanceOracle& metric,
                                             double radius) {
  if (seq.size() < 16) throw PreconditionError("cluster detection needs at least 16 points");
  if (!(radius > 0.0)) throw PreconditionError("cluster radius must be positive");
  const std::size_t first = seq.size() / 2;
  const std::size_t tail = seq.size() - first;
  const std::size_t need = (tail + 1) / 2;
  std::vector<double> d(tail * tail, 0.0);
  parallel_for(tail, [&](std::size_t a) {
    for (std::size_t b = 0; b < tail; ++b)
      if (a != b) d[a * tail + b] = metric(seq[first + a], seq[first + b]);
  });
  std::optional<std::size_t> best;
  std::size_t best_count = 0;
  for (std::size_t a = 0; a < tail; ++a) {
    std::size_t wide = 0, narrow = 0;
    for (std::size_t b = 0; b < tail; ++b) {
      const double v = a == b ? 0.0 : std::max(d[a * tail + b], d[b * tail + a]);
      if (v <= radius) ++wide;
      if (v <= 0.5 * radius) ++narrow;
    }
    if (wide < need || narrow < need) continue;
    const Eigen::VectorXd& p = seq[first + a];
    if (!best || narrow > best_count || (narrow == best_count && lex_less(p, seq[first + *best]))) {
      best = a;
      best_count = narrow;
    }
  }
  if (!best) return std::nullopt;
  return seq[first + *best];
}

PSReport ps_check(const Functional& f, const Setting& setting, const std::vector<SequenceGenerator>& gens,
                  const PSMode& mode, int horizon, const PSTolerances& tolerances, const DifferenceScheme& scheme) {
  if (horizon < 16) throw PreconditionError("PS horizon must be at least 16");
  const int dim = setting.family().dim();
  PSReport report;
  report.mode = mode;
  report.horizon = horizon;
  report.tolerances = tolerances;
  const auto H = static_cast<std::size_t>(horizon);
  const std::size_t tail_start = H - H / 4;

  for (const auto& gen : gens) {
    std::vector<Eigen::VectorXd> points(H);
    for (std::size_t i = 0; i < H; ++i) {
      points[i] = gen.rule(static_cast<int>(i + 1));
      if (points[i].size() != dim || !points[i].allFinite())
        throw DomainError("generator '" + gen.name + "' produced an invalid point at i = " + std::to_string(i + 1));
      if (setting.is_manifold()) setting.structure().chart_containing(points[i]);
    }
    std::vector<double> values(H);
    std::vector<Eigen::VectorXd> duals(H);
    parallel_for(H, [&](std::size_t i) {
      values[i] = f(points[i]);
      duals[i] = setting.dual_norms(differential(f, setting.family(), points[i], scheme), points[i]);
    });

    SequenceVerdict v;
    v.name = gen.name;
    v.kind = gen.kind;
    v.head_gradient = Eigen::VectorXd::Zero(setting.family().count());
    v.tail_gradient = Eigen::VectorXd::Zero(setting.family().count());
    bool finite = true;
    for (std::size_t i = 0; i < H; ++i) {
      if (!std::isfinite(values[i])) finite = false;
      const double av = std::abs(values[i]);
      Eigen::VectorXd& g = i < tail_start ? v.head_gradient : v.tail_gradient;
      (i < tail_start ? v.head_value_max : v.tail_value_max) =
          std::max(i < tail_start ? v.head_value_max : v.tail_value_max, av);
      g = g.cwiseMax(duals[i]);
    }
    v.bounded = finite && v.tail_value_max <= tolerances.growth * v.head_value_max + 1e-9;

    if (mode.at_level) {
      const std::size_t mid = tail_start + (H - tail_start) / 2;
      double early = 0.0, late = 0.0;
      for (std::size_t i = tail_start; i < H; ++i) {
        const double gap = std::abs(values[i] - mode.level);
        v.tail_level_gap = std::max(v.tail_level_gap, gap);
        (i < mid ? early : late) = std::max(i < mid ? early : late, gap);
      }
      v.level_ok = finite && v.tail_level_gap <= tolerances.level && late <= early + 1e-12;
    }

    v.decays = true;
    for (int n = 0; n < v.tail_gradient.size(); ++n) {
      const double t = v.tail_gradient[n];
      if (!std::isfinite(t) || !(t <= tolerances.decay_ratio * v.head_gradient[n] || t <= tolerances.gradient_abs))
        v.decays = false;
    }
    v.qualifying = (mode.at_level ? v.level_ok : v.bounded) && v.decays;
    if (v.qualifying) {
      ++report.qualifying;
      v.cluster_radius = tolerances.cluster_radius;
      v.cluster = cluster_point(
          points, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return setting.distance(x, y); },
          tolerances.cluster_radius);
      if (!v.cluster && report.pass) {
        report.pass = false;
        report.failing_sequence = gen.name;
      }
    }
    report.sequences.push_back(std::move(v));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Near-critical steps

CriticalCertificate frechet_min_step(const Functional& f, const SeminormFamily& family, const Bornology& bornology,
                                     double eps, const GradedPoint& x, int i, const StepConfig& cfg) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (bornology.space_id() != family.space_id()) throw SpaceMismatch(family.space_id(), bornology.space_id());
  const double lambda = std::sqrt(eps);
  const int index = std::clamp(i, 1, family.count());
  EkelandWitness w = qiu_search(f, family, x, eps, std::vector<double>(static_cast<std::size_t>(family.count()), lambda),
                                index, cfg.evp);
  const Eigen::VectorXd& z = w.point.coords();
  const DifferentialRep L = differential(f, family, z, cfg.scheme);

  CriticalCertificate c = certificate("frechet-step", "epsilon", eps, w.point, x.coords(), w.value, w.inf.value, w.inf.source);
  c.value_tolerance = eps;
  c.value_ok = c.value_gap <= c.value_tolerance;
  c.bound = lambda;
  c.bound_rule = "sqrt(epsilon)";
  c.duals_ok = true;
  for (const auto& set : bornology.sets()) {
    double reach = 0.0;
    for (Eigen::Index j = 0; j < set.points.cols(); ++j)
      reach = std::max(reach, family(family.count(), set.points.col(j)));
    const double value = cloud_sup(L, set.points);
    for (int n = 1; n <= family.count(); ++n) {
      DualBound d{set.name, n, value, lambda, lambda * reach, cfg.dual_tolerance, value <= lambda + cfg.dual_tolerance};
      c.duals_ok = c.duals_ok && d.pass;
      c.dual_bounds.push_back(std::move(d));
    }
  }
  c.in_critical_set = c.value_ok && c.duals_ok;
  if (!w.valid) c.notes.push_back("witness did not pass grid verification");
  c.witness = std::move(w);
  return c;
}

CriticalCertificate manifold_min_step(const Functional& f, const FinslerStructure& S, double theta,
                                      const GradedPoint& m, const CompatibilityConstants& consts,
                                      const StepConfig& cfg) {
  if (!(theta > 0.0)) throw PreconditionError("theta must be positive");
  if (cfg.evp.strict_hypotheses && !(theta > 1.0)) throw PreconditionError("theta must exceed 1");
  if (!(consts.alpha > 0.0) || !(consts.beta >= consts.alpha))
    throw PreconditionError("compatibility constants need 0 < alpha <= beta");
  S.family().require_space(m);
  S.chart_containing(m.coords());

  const PathOptions path = cfg.path;
  const DistanceOracle rho = [&S, path](const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
    if (!S.common_chart(y, x)) return kInfinity;
    return finsler_metric(S, y, x, path);
  };
  EkelandWitness w = ekeland_search(f, rho, m, theta * theta, 1.0 / theta, cfg.evp, "finsler");
  const Eigen::VectorXd& z = w.point.coords();
  const DifferentialRep L = differential(f, S.family(), z, cfg.scheme);

  CriticalCertificate c =
      certificate("manifold-step", "theta", theta, w.point, m.coords(), w.value, w.inf.value, w.inf.source);
  c.value_tolerance = theta * theta;
  c.value_ok = c.value_gap <= c.value_tolerance;
  c.bound = theta * theta * consts.beta / consts.alpha;
  c.bound_rule = "theta^2 * beta / alpha";
  c.duals_ok = true;
  for (int n = 1; n <= S.count(); ++n) {
    const DualNormResult r = dual_finsler_norm(S, L, z, n);
    const double value = r.infinite ? kInfinity : r.value;
    DualBound d{"finsler", n, value, c.bound, std::nullopt, cfg.dual_tolerance, value <= c.bound + cfg.dual_tolerance};
    c.duals_ok = c.duals_ok && d.pass;
    c.dual_bounds.push_back(std::move(d));
  }
  c.in_critical_set = c.value_ok && c.duals_ok;
  if (!consts.region.contains(z, 1e-12))
    c.notes.push_back("m_theta lies outside the compatibility region of chart '" + consts.chart_id + "'");
  if (!w.valid) c.notes.push_back("witness did not pass grid verification");
  c.witness = std::move(w);
  return c;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

// Plain sampling descent until f <= level; the radius doubles on success.
Eigen::VectorXd predescend(const Functional& f, Eigen::VectorXd x, double& fx, double level, int rounds,
                           std::uint64_t seed, double floor) {
  Rng rng(seed);
  const int dim = static_cast<int>(x.size());
  const int m = 2 * dim + 32;
  double r = 1.0;
  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(m));
  std::vector<double> values(points.size());
  for (int round = 0; round < rounds && fx > level; ++round) {
    for (int i = 0; i < m; ++i) {
      points[i] = x;
      if (i < 2 * dim)
        points[i][i / 2] += (i % 2 == 0 ? r : -r);
      else
        points[i] += rng.cube(dim, r);
    }
    parallel_for(points.size(), [&](std::size_t i) { values[i] = f(points[i]); });
    int chosen = -1;
    for (int i = 0; i < m; ++i) {
      if (!std::isfinite(values[i])) continue;
      if (values[i] < floor) throw UnboundedBelow("f fell below the floor during pre-descent");
      if (values[i] < fx && (chosen < 0 || values[i] < values[chosen] ||
                             (values[i] == values[chosen] && lex_less(points[i], points[chosen]))))
        chosen = i;
    }
    if (chosen >= 0) {
      x = points[chosen];
      fx = values[chosen];
      r *= 2.0;
    } else {
      r *= 0.5;
      if (r < 1e-12 * (1.0 + x.cwiseAbs().maxCoeff())) break;
    }
  }
  if (fx > level)
    throw PreconditionError("pre-descent could not reach level " + std::to_string(level) + " (stuck at " +
                            std::to_string(fx) + ")");
  return x;
}

}  // namespace

DriverResult minimizing_sequence_driver(const Functional& f, const Setting& setting, const GradedPoint& x0,
                                        const DriverConfig& cfg) {
  if (cfg.i_max < 4) throw PreconditionError("i_max must be at least 4");
  const SeminormFamily& family = setting.family();
  family.require_space(x0);
  DriverResult out;
  out.setting = setting.name();

  const Box region = cfg.region ? *cfg.region : Box::around(x0.coords(), 1.0);
  const InfEstimate inf = estimate_inf(f, region, cfg.step.evp.inf_samples, cfg.seed);
  double c_est = std::min(inf.value, f(x0.coords()));
  out.inf_source = inf.source;

  if (setting.is_manifold()) {
    const FinslerStructure& S = setting.structure();
    if (cfg.compat) {
      out.compat = *cfg.compat;
    } else {
      const Chart& chart = S.chart_containing(region.center());
      out.compat = estimate_compatibility(S, chart, region, cfg.compat_options);
    }
  }

  Eigen::VectorXd x = x0.coords();
  double fx = f(x);
  std::vector<Eigen::VectorXd> iterates;
  for (int i = 1; i <= cfg.i_max; ++i) {
    const double param = 1.0 / i;
    DriverStep step;
    step.i = i;
    try {
      if (fx > c_est + param) {
        x = predescend(f, x, fx, c_est + param, cfg.predescent_rounds, cfg.seed * 7919 + static_cast<std::uint64_t>(i),
                       cfg.step.evp.floor);
        step.predescent = true;
      }
      StepConfig sc = cfg.step;
      sc.evp.inf_estimate = c_est;
      sc.evp.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i);
      const GradedPoint start(x0.space_id(), x);
      CriticalCertificate c = [&] {
        if (!setting.is_manifold()) return frechet_min_step(f, family, setting.bornology(), param, start, i, sc);
        sc.evp.strict_hypotheses = false;
        return manifold_min_step(f, setting.structure(), std::sqrt(param), start, *out.compat, sc);
      }();
      x = c.point.coords();
      fx = c.value;
      step.parameter = setting.is_manifold() ? std::sqrt(param) : param;
    } catch (const Error& e) {
      out.failure = "step " + std::to_string(i) + ": " + e.what();
      break;
    }
    c_est = std::min(c_est, fx);
    step.x = x;
    step.value = fx;
    step.inf_estimate = c_est;
    step.level_bound = c_est + param;
    step.within_level = fx <= step.level_bound;
    if (out.compat) step.in_region = out.compat->region.contains(x, 1e-12);
    out.region_ok = out.region_ok && step.in_region;
    out.trace.push_back(step);
    iterates.push_back(x);
  }
  out.inf_estimate = c_est;
  if (out.failure) return out;
  if (!out.region_ok) out.notes.push_back("an iterate left the compatibility region");

  const DistanceOracle metric = [&setting](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return setting.distance(a, b);
  };
  if (iterates.size() >= 16) {
    out.cluster = cluster_point(iterates, metric, cfg.cluster_radius);
  } else {
    out.cluster = iterates.back();
    out.notes.push_back("fewer than 16 iterates; the last iterate stands in for the cluster point");
  }
  if (!out.cluster) {
    out.ps_failure = true;
    out.notes.push_back("no cluster point at radius " + std::to_string(cfg.cluster_radius) +
                        "; the trace is PS-failure evidence");
    return out;
  }

  const Eigen::VectorXd& xs = *out.cluster;
  const double value = f(xs);
  CriticalCertificate c = certificate("driver", "i_max", static_cast<double>(cfg.i_max), GradedPoint(x0.space_id(), xs),
                                      x0.coords(), value, c_est, out.inf_source);
  c.value_tolerance = cfg.value_tolerance;
  c.value_ok = c.value_gap <= c.value_tolerance;
  c.bound = cfg.dual_tolerance;
  c.bound_rule = "dual_tolerance";
  c.duals_ok = true;
  const DifferentialRep L = differential(f, family, xs, cfg.step.scheme);
  if (setting.is_manifold()) {
    const Eigen::VectorXd norms = setting.dual_norms(L, xs);
    for (int n = 1; n <= family.count(); ++n) {
      DualBound d{"finsler", n, norms[n - 1], c.bound, std::nullopt, 0.0, norms[n - 1] <= c.bound};
      c.duals_ok = c.duals_ok && d.pass;
      c.dual_bounds.push_back(std::move(d));
    }
  } else {
    for (const auto& set : setting.bornology().sets()) {
      const double v = cloud_sup(L, set.points);
      for (int n = 1; n <= family.count(); ++n) {
        DualBound d{set.name, n, v, c.bound, std::nullopt, 0.0, v <= c.bound};
        c.duals_ok = c.duals_ok && d.pass;
        c.dual_bounds.push_back(std::move(d));
      }
    }
  }
  c.in_critical_set = c.value_ok && c.duals_ok;
  c.notes.push_back("level relative to the running inf estimate (" + out.inf_source + ")");
  out.certificate = std::move(c);
  return out;
}

}  // namespace graded
