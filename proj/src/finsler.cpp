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

#include "graded/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "graded/parallel.hpp"
#include "graded/random.hpp"

namespace graded {

// ---------------------------------------------------------------------------
// Charts

Chart Chart::identity(std::string id, Box domain) { return Chart(std::move(id), std::move(domain), ChartKind::Identity); }

Chart Chart::affine(std::string id, Box domain, Eigen::MatrixXd A, Eigen::VectorXd b) {
  const auto dim = domain.dim();
  if (A.rows() != dim || A.cols() != dim || b.size() != dim) throw DomainError("affine chart has wrong shape");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw DomainError("affine chart matrix is singular");
  Chart c(std::move(id), std::move(domain), ChartKind::Affine);
  c.A_ = std::move(A);
  c.A_inv_ = lu.inverse();
  c.b_ = std::move(b);
  if (c.roundtrip_error() > 1e-10) throw DomainError("affine chart is too ill-conditioned to invert");
  return c;
}

Chart Chart::sinh_warp(std::string id, Box domain, double scale) {
  if (!(scale > 0.0)) throw DomainError("sinh chart scale must be positive");
  Chart c(std::move(id), std::move(domain), ChartKind::Sinh);
  c.scale_ = scale;
  if (c.roundtrip_error() > 1e-10) throw DomainError("sinh chart does not invert to 1e-10 on its domain");
  return c;
}

Eigen::VectorXd Chart::forward(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case ChartKind::Identity:
      return x;
    case ChartKind::Affine:
      return A_ * x + b_;
    case ChartKind::Sinh:
      return (scale_ * x.array()).sinh() / scale_;
  }
  return x;
}

Eigen::VectorXd Chart::backward(const Eigen::VectorXd& y) const {
  switch (kind_) {
    case ChartKind::Identity:
      return y;
    case ChartKind::Affine:
      return A_inv_ * (y - b_);
    case ChartKind::Sinh:
      return (scale_ * y.array()).asinh() / scale_;
  }
  return y;
}

Eigen::VectorXd Chart::backward_tangent(const Eigen::VectorXd& y, const Eigen::VectorXd& u) const {
  switch (kind_) {
    case ChartKind::Identity:
      return u;
    case ChartKind::Affine:
      return A_inv_ * u;
    case ChartKind::Sinh:
      return u.array() / (1.0 + (scale_ * y.array()).square()).sqrt();
  }
  return u;
}

double Chart::roundtrip_error(int samples, std::uint64_t seed) const {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = rng.uniform_vector(domain_.lo, domain_.hi);
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    worst = std::max(worst, (backward(forward(x)) - x).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

std::string Chart::kind_name() const {
  switch (kind_) {
    case ChartKind::Identity:
      return "identity";
    case ChartKind::Affine:
      return "affine";
    case ChartKind::Sinh:
      return "sinh";
  }
  return "identity";
}

// ---------------------------------------------------------------------------
// Structures

FinslerStructure::FinslerStructure(SeminormFamily family, std::vector<Chart> atlas, TangentRule rule, double kappa)
    : family_(std::move(family)), atlas_(std::move(atlas)), rule_(rule), kappa_(kappa) {
  if (atlas_.empty()) throw DomainError("Finsler structure needs at least one chart");
  for (const auto& c : atlas_)
    if (c.dim() != family_.dim()) throw DomainError("chart '" + c.id() + "' has wrong dimension");
  if (!(kappa_ >= 0.0)) throw DomainError("conformal kappa must be non-negative");
}

FinslerStructure FinslerStructure::flat(SeminormFamily family, Box domain) {
  std::vector<Chart> atlas{Chart::identity("chart0", std::move(domain))};
  return FinslerStructure(std::move(family), std::move(atlas), TangentRule::Flat);
}

FinslerStructure FinslerStructure::conformal(SeminormFamily family, Box domain, double kappa) {
  std::vector<Chart> atlas{Chart::identity("chart0", std::move(domain))};
  return FinslerStructure(std::move(family), std::move(atlas), TangentRule::Conformal, kappa);
}

double FinslerStructure::conformal_factor(const Eigen::VectorXd& x) const {
  if (rule_ == TangentRule::Flat) return 1.0;
  const double p = family_(1, x);
  return 1.0 + kappa_ * p * p;
}

const Chart& FinslerStructure::chart_containing(const Eigen::VectorXd& x) const {
  for (const auto& c : atlas_)
    if (c.contains(x)) return c;
  throw DomainError("point lies outside every chart of the atlas");
}

const Chart* FinslerStructure::common_chart(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  for (const auto& c : atlas_)
    if (c.contains(x) && c.contains(y)) return &c;
  return nullptr;
}

const Chart& FinslerStructure::chart(const std::string& id) const {
  for (const auto& c : atlas_)
    if (c.id() == id) return c;
  throw DomainError("unknown chart '" + id + "'");
}

namespace {

double tangent_norm(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& v, int n) {
  return S.conformal_factor(x) * S.family()(n, v);
}

// 5-point Gauss-Legendre on [0, 1].
constexpr double kNodes[5] = {0.5, 0.5 - 0.5 * 0.5384693101056831, 0.5 + 0.5 * 0.5384693101056831,
                              0.5 - 0.5 * 0.9061798459386640, 0.5 + 0.5 * 0.9061798459386640};
constexpr double kWeights[5] = {0.5 * 0.5688888888888889, 0.5 * 0.4786286704993665, 0.5 * 0.4786286704993665,
                                0.5 * 0.2369268850561891, 0.5 * 0.2369268850561891};

template <typename F>
double gauss(const F& g, double lo, double hi) {
  double total = 0.0;
  for (int i = 0; i < 5; ++i) total += kWeights[i] * g(lo + (hi - lo) * kNodes[i]);
  return (hi - lo) * total;
}

template <typename F>
double adaptive(const F& g, double lo, double hi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = gauss(g, lo, mid);
  const double right = gauss(g, mid, hi);
  if (depth == 0 || std::abs(left + right - whole) <= tol * (1.0 + std::abs(whole))) return left + right;
  return adaptive(g, lo, mid, left, 0.5 * tol, depth - 1) + adaptive(g, mid, hi, right, 0.5 * tol, depth - 1);
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

class PathOptimizer {
 public:
  PathOptimizer(const FinslerStructure& S, const Chart& chart, int n, const PathOptions& options)
      : S_(S), chart_(chart), n_(n), options_(options) {}

  double segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return segment_length(S_, chart_, a, b, n_);
  }

  double total(const std::vector<Eigen::VectorXd>& nodes) const {
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) sum += segment(nodes[j], nodes[j + 1]);
    return sum;
  }

  static std::vector<Eigen::VectorXd> subdivide(const std::vector<Eigen::VectorXd>& nodes) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(2 * nodes.size() - 1);
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      out.push_back(nodes[j]);
      out.push_back(0.5 * (nodes[j] + nodes[j + 1]));
    }
    out.push_back(nodes.back());
    return out;
  }

  // Splits the longest chart-coordinate segments until `target` nodes.
  static std::vector<Eigen::VectorXd> pad(std::vector<Eigen::VectorXd> nodes, int target) {
    while (static_cast<int>(nodes.size()) < target) {
      std::size_t longest = 0;
      double best = -1.0;
      for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
        const double len = (nodes[j + 1] - nodes[j]).squaredNorm();
        if (len > best) {
          best = len;
          longest = j;
        }
      }
      nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(longest) + 1,
                   0.5 * (nodes[longest] + nodes[longest + 1]));
    }
    return nodes;
  }

  void optimize(std::vector<Eigen::VectorXd>& nodes) const {
    const double infinity = std::numeric_limits<double>::infinity();
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < options_.sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t j = 1; j + 1 < nodes.size(); ++j) {
        for (Eigen::Index d = 0; d < nodes[j].size(); ++d) {
          const Eigen::VectorXd base = nodes[j];
          auto local = [&](double t) {
            Eigen::VectorXd moved = base;
            moved[d] += t;
            if (!chart_.contains(chart_.backward(moved))) return infinity;
            return segment(nodes[j - 1], moved) + segment(moved, nodes[j + 1]);
          };
          const double reach = 0.5 * std::max((nodes[j + 1] - nodes[j - 1]).cwiseAbs().maxCoeff(), 1e-12);
          double a = -reach, b = reach;
          double c = b - golden * (b - a), e = a + golden * (b - a);
          double fc = local(c), fe = local(e);
          for (int it = 0; it < options_.golden_iterations; ++it) {
            if (fc < fe) {
              b = e;
              e = c;
              fe = fc;
              c = b - golden * (b - a);
              fc = local(c);
            } else {
              a = c;
              c = e;
              fc = fe;
              e = a + golden * (b - a);
              fe = local(e);
            }
          }
          const double t = fc < fe ? c : e;
          const double candidate = std::min(fc, fe);
          const double current = local(0.0);
          if (candidate < current) {
            nodes[j][d] = base[d] + t;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }

 private:
  const FinslerStructure& S_;
  const Chart& chart_;
  int n_;
  PathOptions options_;
};

}  // namespace

double finsler_norm(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& v, int n) {
  S.family().check_index(n);
  S.chart_containing(x);
  return tangent_norm(S, x, v, n);
}

Curve straight_curve(const Chart& chart, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int nodes) {
  Curve curve{chart.id(), {}};
  const Eigen::VectorXd a = chart.forward(x);
  const Eigen::VectorXd b = chart.forward(y);
  const int count = std::max(nodes, 2);
  for (int i = 0; i < count; ++i) curve.nodes.push_back(a + (b - a) * (static_cast<double>(i) / (count - 1)));
  return curve;
}

double segment_length(const FinslerStructure& S, const Chart& chart, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b, int n, double tolerance) {
  const Eigen::VectorXd velocity = b - a;
  if ((velocity.array() == 0.0).all()) return 0.0;
  auto integrand = [&](double s) {
    const Eigen::VectorXd y = a + s * velocity;
    return tangent_norm(S, chart.backward(y), chart.backward_tangent(y, velocity), n);
  };
  // Constant integrands need no refinement.
  if (S.rule() == TangentRule::Flat && chart.linear()) return integrand(0.5);
  const double whole = gauss(integrand, 0.0, 1.0);
  return adaptive(integrand, 0.0, 1.0, whole, tolerance, 12);
}

double curve_length(const FinslerStructure& S, const Curve& curve, int n) {
  S.family().check_index(n);
  if (curve.nodes.size() < 2) throw DomainError("a curve needs at least two nodes");
  const Chart& chart = S.chart(curve.chart_id);
  for (const auto& node : curve.nodes)
    if (!chart.contains(chart.backward(node))) throw DomainError("curve node lies outside chart '" + chart.id() + "'");
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < curve.nodes.size(); ++j)
    total += segment_length(S, chart, curve.nodes[j], curve.nodes[j + 1], n);
  return total;
}

PathResult directed_path(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                         const PathOptions& options) {
  S.family().check_index(n);
  const Chart* chart = S.common_chart(x, y);
  if (chart == nullptr) throw DomainError("endpoints do not share a chart");
  PathResult result;
  result.curve = straight_curve(*chart, x, y);
  if (x == y) {
    result.ladder = {0.0};
    return result;
  }
  PathOptimizer optimizer(S, *chart, n, options);
  result.length = optimizer.total(result.curve.nodes);
  result.ladder.push_back(result.length);

  const bool straight_is_geodesic =
      S.dim() == 1 || (S.rule() == TangentRule::Flat && chart->linear());
  if (straight_is_geodesic && !options.force_optimize) return result;

  result.optimized = true;
  std::vector<Eigen::VectorXd> nodes = result.curve.nodes;
  while (static_cast<int>(2 * nodes.size() - 1) <= options.nodes) {
    nodes = PathOptimizer::subdivide(nodes);
    optimizer.optimize(nodes);
    result.ladder.push_back(optimizer.total(nodes));
  }
  if (static_cast<int>(nodes.size()) < options.nodes) {
    nodes = PathOptimizer::pad(std::move(nodes), options.nodes);
    optimizer.optimize(nodes);
    result.ladder.push_back(optimizer.total(nodes));
  }
  // Subdividing a straight segment does not change the curve, so the ladder
  // is non-increasing up to quadrature error; keep the best level.
  const double final_length = result.ladder.back();
  if (final_length <= result.length) {
    result.length = final_length;
    result.curve.nodes = std::move(nodes);
  }
  return result;
}

PathResult pseudometric_path(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                             const PathOptions& options) {
  if (lex_less(y, x)) {
    PathResult r = directed_path(S, y, x, n, options);
    std::reverse(r.curve.nodes.begin(), r.curve.nodes.end());
    return r;
  }
  return directed_path(S, x, y, n, options);
}

double pseudometric(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n,
                    const PathOptions& options) {
  return pseudometric_path(S, x, y, n, options).length;
}

Eigen::VectorXd pseudometrics(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const PathOptions& options) {
  Eigen::VectorXd d(S.count());
  for (int n = 1; n <= S.count(); ++n) d[n - 1] = pseudometric(S, x, y, n, options);
  return d;
}

double finsler_metric(const FinslerStructure& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const PathOptions& options) {
  return bounded_sum(pseudometrics(S, x, y, options));
}

// ---------------------------------------------------------------------------
// Axiom (2), compatibility constants, dual norms

AxiomReport verify_finsler_axioms(const FinslerStructure& S, const Chart& chart, const Eigen::VectorXd& x0, double K,
                                  const AxiomOptions& options) {
  if (!(K > 1.0)) throw DomainError("axiom constant K must exceed 1");
  if (!chart.contains(x0)) throw DomainError("x0 lies outside chart '" + chart.id() + "'");
  const int dim = S.dim();
  Rng rng(options.seed);

  std::vector<Eigen::VectorXd> directions;
  for (int k = 0; k < dim; ++k) directions.push_back(Eigen::VectorXd::Unit(dim, k));
  while (static_cast<int>(directions.size()) < std::max(options.directions, dim)) directions.push_back(rng.cube(dim, 1.0));

  const Eigen::VectorXd y0 = chart.forward(x0);
  const Eigen::VectorXd half = 0.5 * (chart.domain().hi - chart.domain().lo);
  struct Sample {
    double distance;
    double ratio;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(options.points));
  std::vector<Eigen::VectorXd> xs(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = std::pow(10.0, -4.0 + 4.0 * static_cast<double>(i) / std::max<double>(1.0, samples.size() - 1.0));
    Eigen::VectorXd u = rng.cube(dim, 1.0);
    u /= std::max(u.cwiseAbs().maxCoeff(), 1e-300);
    xs[i] = chart.domain().clamp(x0 + s * half.cwiseProduct(u));
  }
  parallel_for(samples.size(), [&](std::size_t i) {
    const Eigen::VectorXd& x = xs[i];
    const Eigen::VectorXd y = chart.forward(x);
    double worst = 1.0;
    for (int n = 1; n <= S.count(); ++n) {
      for (const auto& v : directions) {
        const double at0 = tangent_norm(S, x0, chart.backward_tangent(y0, v), n);
        const double at = tangent_norm(S, x, chart.backward_tangent(y, v), n);
        if (at0 == 0.0 && at == 0.0) continue;
        if (at0 == 0.0 || at == 0.0) {
          worst = std::numeric_limits<double>::infinity();
          continue;
        }
        worst = std::max({worst, at / at0, at0 / at});
      }
    }
    samples[i] = {finsler_metric(S, x, x0, options.path), worst};
  });

  AxiomReport report;
  report.K = K;
  report.samples = static_cast<int>(samples.size());
  double max_distance = 0.0;
  double first_violation = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    max_distance = std::max(max_distance, s.distance);
    if (s.ratio > K) first_violation = std::min(first_violation, s.distance);
  }
  auto holds_within = [&](double r) {
    for (const auto& s : samples)
      if (s.distance < r && s.ratio > K) return false;
    return true;
  };
  double lo = 0.0;
  double hi = std::nextafter(max_distance, 1.0);
  if (holds_within(hi)) {
    report.holds_everywhere = true;
    lo = hi;
  } else {
    for (int it = 0; it < options.bisection_steps; ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds_within(mid) ? lo : hi) = mid;
    }
    report.first_violation = first_violation;
  }
  report.radius = lo;
  for (const auto& s : samples)
    if (s.distance < report.radius) report.worst_ratio = std::max(report.worst_ratio, s.ratio);
  return report;
}

CompatibilityConstants estimate_compatibility(const FinslerStructure& S, const Chart& chart, const Box& region,
                                              const CompatOptions& options) {
  const int dim = S.dim();
  if (region.dim() != dim) throw DomainError("compatibility region has wrong dimension");
  if (!chart.contains(region.lo) || !chart.contains(region.hi))
    throw DomainError("compatibility region is not inside chart '" + chart.id() + "'");
  Rng rng(options.seed);

  std::vector<Eigen::VectorXd> grid;
  const int g = std::max(options.grid, 2);
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    Eigen::VectorXd p(dim);
    for (int k = 0; k < dim; ++k)
      p[k] = region.lo[k] + (region.hi[k] - region.lo[k]) * idx[static_cast<std::size_t>(k)] / (g - 1.0);
    grid.push_back(p);
    int k = 0;
    while (k < dim && ++idx[static_cast<std::size_t>(k)] == g) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == dim) break;
  }

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) pairs.emplace_back(grid[i], grid[j]);
  constexpr std::size_t kMaxGridPairs = 400;
  if (pairs.size() > kMaxGridPairs) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> kept;
    for (std::size_t i = 0; i < kMaxGridPairs; ++i) kept.push_back(pairs[rng.next() % pairs.size()]);
    pairs = std::move(kept);
  }
  const Eigen::VectorXd width = region.hi - region.lo;
  for (int i = 0; i < options.near_pairs; ++i) {
    const Eigen::VectorXd x = rng.uniform_vector(region.lo, region.hi);
    const double s = std::pow(10.0, -4.0 + 4.0 * i / std::max(1.0, options.near_pairs - 1.0));
    const Eigen::VectorXd y = region.clamp(x + s * width.cwiseProduct(rng.cube(dim, 1.0)));
    pairs.emplace_back(x, y);
  }

  std::vector<Eigen::Vector2d> extremes(pairs.size(), Eigen::Vector2d(std::numeric_limits<double>::infinity(), -1.0));
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const double rho = finsler_metric(S, x, y, options.path);
    if (!(rho > 0.0)) return;
    const Eigen::VectorXd diff = chart.forward(x) - chart.forward(y);
    for (int n = 1; n <= S.count(); ++n) {
      const double r = S.family()(n, diff) / rho;
      extremes[i][0] = std::min(extremes[i][0], r);
      extremes[i][1] = std::max(extremes[i][1], r);
    }
  });

  CompatibilityConstants out{chart.id(), std::numeric_limits<double>::infinity(), -1.0, region, 0};
  for (const auto& e : extremes) {
    if (e[1] < 0.0) continue;
    ++out.pairs;
    out.alpha = std::min(out.alpha, e[0]);
    out.beta = std::max(out.beta, e[1]);
  }
  if (out.pairs == 0) throw DomainError("every sampled pair has zero Finsler distance");
  if (!(out.alpha > 0.0))
    throw DomainError("compatibility lower constant is zero; a seminorm vanishes on a sampled chart difference");
  return out;
}

DualNormResult dual_finsler_norm(const FinslerStructure& S, const DifferentialRep& w, const Eigen::VectorXd& x, int n,
                                 int resolution) {
  S.family().check_index(n);
  S.chart_containing(x);
  if (w.basis_values.size() != S.dim()) throw DomainError("differential has wrong dimension");
  const int res = resolution > 0 ? resolution : default_resolution(S.dim());
  const Eigen::MatrixXd cloud = sphere_cloud(S.family(), n, res);

  DualNormResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < cloud.cols(); ++j) {
    const Eigen::VectorXd v = cloud.col(j);
    const double len = tangent_norm(S, x, v, n);
    ++result.directions;
    if (len == 0.0) {
      ++result.degenerate_directions;
      if (w(v) != 0.0) result.infinite = true;
      continue;
    }
    best = std::max(best, w(v) / len);
  }
  const double scale = 1.0 + w.basis_values.cwiseAbs().maxCoeff();
  for (int k = 0; k < S.dim(); ++k) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(S.dim(), k);
    if (S.family()(n, e) != 0.0) continue;
    ++result.directions;
    ++result.degenerate_directions;
    if (std::abs(w(e)) > 1e-12 * scale) result.infinite = true;
  }
  if (best == -std::numeric_limits<double>::infinity())
    throw DomainError("every sampled direction has zero Finsler length");
  result.value = result.infinite ? std::numeric_limits<double>::infinity() : std::max(best, 0.0);
  return result;
}

}  // namespace graded
