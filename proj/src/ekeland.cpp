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

#include "graded/ekeland.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graded/error.hpp"
#include "graded/parallel.hpp"
#include "graded/random.hpp"

namespace graded {

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grids and configuration

GridSpec GridSpec::around(const Eigen::VectorXd& center, double half_width, int target, double offset) {
  if (!(half_width > 0.0)) throw DomainError("grid half-width must be positive");
  const auto dim = static_cast<double>(center.size());
  int per_axis = std::max(2, static_cast<int>(std::ceil(std::pow(std::max(target, 2), 1.0 / dim) - 1e-9)));
  return {Box::around(center, half_width), per_axis, offset};
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (Eigen::Index k = 0; k < box.dim(); ++k) total *= static_cast<std::size_t>(per_axis);
  return total;
}

Eigen::VectorXd GridSpec::point(std::size_t index) const {
  Eigen::VectorXd p(box.dim());
  for (Eigen::Index k = 0; k < box.dim(); ++k) {
    const auto i = static_cast<double>(index % static_cast<std::size_t>(per_axis));
    index /= static_cast<std::size_t>(per_axis);
    const double h = (box.hi[k] - box.lo[k]) / (per_axis - 1);
    p[k] = box.lo[k] + (i + offset) * h;
  }
  return p;
}

void EVPConfig::validate() const {
  if (max_iterations <= 0) throw ConfigError("max_iterations", "must be positive");
  if (samples < 0) throw ConfigError("samples", "must be positive (or 0 for the default)");
  if (inner_max <= 0) throw ConfigError("inner_max", "must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink", "must lie in (0, 1)");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance", "must be non-negative");
  if (!(initial_radius > 0.0)) throw ConfigError("initial_radius", "must be positive");
  if (!(min_radius > 0.0) || min_radius >= initial_radius) throw ConfigError("min_radius", "must lie in (0, initial_radius)");
  if (!(grid_half_width > 0.0)) throw ConfigError("grid_half_width", "must be positive");
  if (grid_points < 2) throw ConfigError("grid_points", "must be at least 2");
  if (polish_passes < 0) throw ConfigError("polish_passes", "must be non-negative");
  if (inf_samples <= 0) throw ConfigError("inf_samples", "must be positive");
  if (grid && grid->per_axis < 2) throw ConfigError("grid", "needs at least two points per axis");
}

InfEstimate estimate_inf(const Functional& f, const Box& box, int samples, std::uint64_t seed) {
  if (box.dim() != f.dim) throw DomainError("inf box has wrong dimension");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(samples));
  for (auto& p : points) p = rng.uniform_vector(box.lo, box.hi);
  std::vector<double> values(points.size());
  parallel_for(points.size(), [&](std::size_t i) { values[i] = f(points[i]); });
  double best = std::numeric_limits<double>::infinity();
  for (double v : values)
    if (std::isfinite(v)) best = std::min(best, v);
  InfEstimate out{best, "sampled", samples};
  if (f.lower_bound && *f.lower_bound <= best) {
    out.value = *f.lower_bound;
    out.source = "lower_bound";
  }
  return out;
}

std::string to_string(SearchStatus s) { return s == SearchStatus::Converged ? "converged" : "budget-exhausted"; }

// ---------------------------------------------------------------------------
// Penalties

PenaltySpec PenaltySpec::ekeland(DistanceOracle sigma, double a, double b, std::string metric_name) {
  if (!sigma) throw DomainError("classical penalty needs a distance oracle");
  if (!(a > 0.0)) throw PreconditionError("a must be positive");
  if (!(b > 0.0)) throw PreconditionError("b must be positive");
  PenaltySpec p;
  p.sigma_ = std::move(sigma);
  p.metric_name_ = std::move(metric_name);
  p.a_ = a;
  p.b_ = b;
  return p;
}

PenaltySpec PenaltySpec::qiu(SeminormFamily family, double eta, std::vector<double> lambdas, int index) {
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  if (static_cast<int>(lambdas.size()) < family.count())
    throw PreconditionError("need at least N = " + std::to_string(family.count()) + " lambdas");
  for (double l : lambdas)
    if (!(l > 0.0)) throw PreconditionError("lambdas must be positive");
  if (index < 1 || index > family.count())
    throw PreconditionError("index i must lie in 1.." + std::to_string(family.count()));
  PenaltySpec p;
  p.metric_name_ = "graded";
  p.family_ = std::move(family);
  p.eta_ = eta;
  p.lambdas_ = std::move(lambdas);
  p.index_ = index;
  return p;
}

double PenaltySpec::operator()(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const {
  if (!family_) return a_ * b_ * sigma_(y, x);
  const Eigen::VectorXd diff = y - x;
  double best = 0.0;
  for (int j = 1; j <= family_->count(); ++j) best = std::max(best, lambdas_[j - 1] * (*family_)(j, diff));
  return best;
}

Eigen::Vector2d PenaltySpec::anchor_margins(double f0, double fz, const Eigen::VectorXd& z,
                                            const Eigen::VectorXd& x0) const {
  if (!family_) return {f0 - fz, 1.0 / b_ - sigma_(z, x0)};
  const Eigen::VectorXd diff = z - x0;
  double decrease = std::numeric_limits<double>::infinity();
  double distance = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= index_; ++j) {
    const double p = (*family_)(j, diff);
    const double l = lambdas_[j - 1];
    decrease = std::min(decrease, f0 - fz - l * p);
    distance = std::min(distance, eta_ / l - p);
  }
  return {decrease, distance};
}

bool PenaltySpec::admissible(double f0, double fy, const Eigen::VectorXd& y, const Eigen::VectorXd& x0) const {
  if (!family_) {
    const double s = sigma_(y, x0);
    return fy + a_ * b_ * s <= f0 && s <= 1.0 / b_;
  }
  const Eigen::VectorXd diff = y - x0;
  double pen = 0.0;
  for (int j = 1; j <= index_; ++j) {
    const double p = (*family_)(j, diff);
    const double l = lambdas_[j - 1];
    if (!(p < eta_ / l)) return false;
    pen = std::max(pen, l * p);
  }
  return fy + pen <= f0;
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct Candidate {
  Eigen::VectorXd point;
  double value;
};

class Searcher {
 public:
  Searcher(const Functional& f, const PenaltySpec& penalty, const Eigen::VectorXd& x0, double f0,
           const EVPConfig& cfg)
      : f_(f), penalty_(penalty), x0_(x0), f0_(f0), cfg_(cfg), rng_(cfg.seed) {}

  long evaluations() const { return evaluations_; }

  // Approximate minimiser of f over S(xk) that also passes the anchor test.
  Candidate inner(const Eigen::VectorXd& xk, double fk, double& last_radius) {
    const int dim = static_cast<int>(xk.size());
    const int m = cfg_.sample_count(dim);
    Candidate best{xk, fk};
    double r = cfg_.initial_radius;
    std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(m));
    std::vector<double> values(points.size());
    std::vector<char> feasible(points.size());
    for (int round = 0; round < cfg_.inner_max; ++round) {
      if (r < cfg_.min_radius * (1.0 + best.point.cwiseAbs().maxCoeff())) break;
      for (int i = 0; i < m; ++i) {
        if (i < 2 * dim) {
          points[i] = best.point;
          points[i][i / 2] += (i % 2 == 0 ? r : -r);
        } else {
          points[i] = best.point + rng_.cube(dim, r);
        }
      }
      const double center_value = best.value;
      parallel_for(points.size(), [&](std::size_t i) {
        const double v = f_(points[i]);
        values[i] = v;
        feasible[i] = std::isfinite(v) && v < center_value && v + penalty_(points[i], xk) <= fk &&
                      penalty_.admissible(f0_, v, points[i], x0_);
      });
      evaluations_ += m;
      int chosen = -1;
      for (int i = 0; i < m; ++i) {
        if (std::isfinite(values[i]) && values[i] < cfg_.floor)
          throw UnboundedBelow("f fell below the floor " + std::to_string(cfg_.floor) + " at a sampled point");
        if (!feasible[i]) continue;
        if (chosen < 0 || values[i] < values[chosen] ||
            (values[i] == values[chosen] && lex_less(points[i], points[chosen])))
          chosen = i;
      }
      if (chosen >= 0) {
        best = {points[chosen], values[chosen]};
        last_radius = r;
        r = std::min(r / cfg_.shrink, cfg_.initial_radius);
      } else {
        r *= cfg_.shrink;
      }
    }
    return best;
  }

  // Best grid point violating strictness at z that is still admissible.
  std::optional<Candidate> grid_violator(const GridSpec& grid, const Eigen::VectorXd& z, double fz) {
    const std::size_t n = grid.size();
    std::vector<double> values(n);
    std::vector<char> usable(n);
    parallel_for(n, [&](std::size_t i) {
      const Eigen::VectorXd y = grid.point(i);
      const double v = f_(y);
      values[i] = v;
      usable[i] = y != z && std::isfinite(v) && v < fz && v + penalty_(y, z) < fz &&
                  penalty_.admissible(f0_, v, y, x0_);
    });
    evaluations_ += static_cast<long>(n);
    std::optional<Candidate> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (!usable[i]) continue;
      Eigen::VectorXd y = grid.point(i);
      if (!best || values[i] < best->value || (values[i] == best->value && lex_less(y, best->point)))
        best = Candidate{std::move(y), values[i]};
    }
    return best;
  }

 private:
  const Functional& f_;
  const PenaltySpec& penalty_;
  Eigen::VectorXd x0_;
  double f0_;
  const EVPConfig& cfg_;
  Rng rng_;
  long evaluations_ = 0;
};

}  // namespace

EkelandWitness evp_search(const Functional& f, const PenaltySpec& penalty, const GradedPoint& x0,
                          const EVPConfig& cfg) {
  cfg.validate();
  if (x0.space_id() != f.space_id) throw SpaceMismatch(f.space_id, x0.space_id());
  if (x0.dim() != f.dim) throw DomainError("start point has wrong dimension");
  const Eigen::VectorXd start = x0.coords();
  const double f0 = f(start);
  if (!std::isfinite(f0)) throw DomainError("f is not finite at the start point");
  if (f0 < cfg.floor) throw UnboundedBelow("f is below the floor at the start point");

  EkelandWitness w{x0, f0, start, f0, {}, SearchStatus::Converged, 0, 1, {}, {}, false};
  Searcher searcher(f, penalty, start, f0, cfg);
  Eigen::VectorXd x = start;
  double fx = f0;
  std::optional<GridSpec> grid = cfg.grid;
  int passes = 0;
  while (true) {
    bool exhausted = true;
    while (w.iterations < cfg.max_iterations) {
      ++w.iterations;
      double radius = 0.0;
      const Candidate next = searcher.inner(x, fx, radius);
      if (!(next.value < fx)) {
        exhausted = false;
        break;
      }
      w.trace.push_back({w.iterations, fx, next.value, penalty(next.point, x), radius, "sample"});
      const double improvement = fx - next.value;
      x = next.point;
      fx = next.value;
      if (improvement < cfg.tolerance) {
        exhausted = false;
        break;
      }
    }
    if (exhausted) {
      w.status = SearchStatus::BudgetExhausted;
      break;
    }
    if (!grid) grid = GridSpec::around(x, cfg.grid_half_width, cfg.grid_points);
    if (!cfg.polish || passes >= cfg.polish_passes) break;
    const auto violator = searcher.grid_violator(*grid, x, fx);
    if (!violator) break;
    ++passes;
    w.trace.push_back({w.iterations, fx, violator->value, penalty(violator->point, x), 0.0, "polish"});
    x = violator->point;
    fx = violator->value;
  }
  if (!grid) grid = GridSpec::around(x, cfg.grid_half_width, cfg.grid_points);

  w.point = GradedPoint(x0.space_id(), x);
  w.value = fx;
  w.evaluations = 1 + searcher.evaluations();
  w.verification = verify_witness(f, w, penalty, *grid);
  w.valid = w.verification.valid && w.status == SearchStatus::Converged;
  return w;
}

namespace {

InfEstimate resolve_inf(const Functional& f, const Eigen::VectorXd& x, const EVPConfig& cfg) {
  if (cfg.inf_estimate) return {*cfg.inf_estimate, "supplied", 0};
  const Box box = cfg.inf_box ? *cfg.inf_box : Box::around(x, std::max(1.0, cfg.initial_radius));
  return estimate_inf(f, box, cfg.inf_samples, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace

EkelandWitness ekeland_search(const Functional& f, const DistanceOracle& sigma, const GradedPoint& x, double a,
                              double b, const EVPConfig& cfg, std::string metric_name) {
  if (cfg.strict_hypotheses && !(a > 1.0)) throw PreconditionError("a must exceed 1");
  const PenaltySpec penalty = PenaltySpec::ekeland(sigma, a, b, std::move(metric_name));
  const InfEstimate inf = resolve_inf(f, x.coords(), cfg);
  const double fx = f(x.coords());
  if (fx > inf.value + a)
    throw PreconditionError("f(x) = " + std::to_string(fx) + " exceeds inf estimate " + std::to_string(inf.value) +
                            " + a");
  EkelandWitness w = evp_search(f, penalty, x, cfg);
  w.inf = inf;
  return w;
}

EkelandWitness qiu_search(const Functional& f, const SeminormFamily& family, const GradedPoint& x0, double eta,
                          const std::vector<double>& lambdas, int i, const EVPConfig& cfg) {
  family.require_space(x0);
  const PenaltySpec penalty = PenaltySpec::qiu(family, eta, lambdas, i);
  const InfEstimate inf = resolve_inf(f, x0.coords(), cfg);
  const double fx = f(x0.coords());
  if (fx > inf.value + eta)
    throw PreconditionError("f(x0) = " + std::to_string(fx) + " exceeds inf estimate " + std::to_string(inf.value) +
                            " + eta");
  EkelandWitness w = evp_search(f, penalty, x0, cfg);
  w.inf = inf;
  return w;
}

VerificationReport verify_witness(const Functional& f, const EkelandWitness& witness, const PenaltySpec& penalty,
                                  const GridSpec& grid) {
  const Eigen::VectorXd& z = witness.point.coords();
  if (grid.box.dim() != z.size()) throw DomainError("verification grid has wrong dimension");
  const double fz = f(z);
  const double f0 = f(witness.start);
  const Eigen::Vector2d anchor = penalty.anchor_margins(f0, fz, z, witness.start);

  const std::size_t n = grid.size();
  std::vector<double> margins(n);
  parallel_for(n, [&](std::size_t i) {
    const Eigen::VectorXd y = grid.point(i);
    if (y == z) {
      margins[i] = std::numeric_limits<double>::infinity();
      return;
    }
    const double v = f(y) + penalty(y, z) - fz;
    margins[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  });
  std::size_t worst = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (margins[i] < margins[worst]) worst = i;

  VerificationReport r;
  r.grid = grid;
  r.grid_points = n;
  r.worst_point = grid.point(worst);
  r.conclusions = {{"value-decrease", anchor[0], anchor[0] >= -kWitnessSlack},
                   {"distance", anchor[1], anchor[1] >= -kWitnessSlack},
                   {"strictness", margins[worst], margins[worst] >= -kWitnessSlack}};
  r.min_margin = std::min({anchor[0], anchor[1], margins[worst]});
  r.valid = std::all_of(r.conclusions.begin(), r.conclusions.end(), [](const auto& c) { return c.pass; });
  return r;
}

}  // namespace graded
