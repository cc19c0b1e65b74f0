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

#include "graded/bornology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace graded {

namespace {

std::string scaled_name(const std::string& base, double scale) {
  if (scale == 1.0) return base;
  std::ostringstream os;
  os << base << '@' << scale;
  return os.str();
}

using DirectionKey = std::vector<long long>;

// Sign-canonical unit direction quantised to 1e-8.
std::optional<DirectionKey> direction_key(const Eigen::VectorXd& v, double* norm) {
  *norm = v.norm();
  if (*norm == 0.0) return std::nullopt;
  Eigen::VectorXd u = v / *norm;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (std::abs(u[k]) > 1e-12) {
      if (u[k] < 0) u = -u;
      break;
    }
  }
  DirectionKey key(static_cast<std::size_t>(u.size()));
  for (Eigen::Index k = 0; k < u.size(); ++k) key[static_cast<std::size_t>(k)] = std::llround(u[k] * 1e8);
  return key;
}

class HullIndex {
 public:
  explicit HullIndex(const Eigen::MatrixXd& cloud) : cloud_(cloud) {
    for (Eigen::Index j = 0; j < cloud.cols(); ++j) {
      double norm = 0.0;
      auto key = direction_key(cloud.col(j), &norm);
      if (!key) continue;
      auto [it, inserted] = reach_.emplace(std::move(*key), norm);
      if (!inserted) it->second = std::max(it->second, norm);
    }
  }

  bool contains(const Eigen::VectorXd& point, double tol) const {
    double norm = 0.0;
    auto key = direction_key(point, &norm);
    if (!key) return cloud_.cols() > 0;
    if (auto it = reach_.find(*key); it != reach_.end() && norm <= it->second * (1.0 + tol) + tol) return true;
    return balanced_hull_contains(cloud_, point, tol);
  }

 private:
  const Eigen::MatrixXd& cloud_;
  std::map<DirectionKey, double> reach_;
};

void enumerate_cube_surface(int dim, int m, const std::function<void(const Eigen::VectorXd&)>& visit) {
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  Eigen::VectorXd s(dim);
  const double step = 2.0 / (m - 1);
  while (true) {
    bool on_surface = false;
    for (int k = 0; k < dim; ++k) {
      const int i = idx[static_cast<std::size_t>(k)];
      s[k] = (i == m - 1) ? 1.0 : -1.0 + step * i;
      if (i == 0 || i == m - 1) on_surface = true;
    }
    if (on_surface) visit(s);
    int k = 0;
    while (k < dim && ++idx[static_cast<std::size_t>(k)] == m) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == dim) break;
  }
}

}  // namespace

Bornology::Bornology(std::string space_id, int dim, int count, std::vector<BoundedSet> sets,
                     std::vector<double> radii)
    : space_id_(std::move(space_id)), dim_(dim), count_(count), sets_(std::move(sets)), radii_(std::move(radii)) {
  if (dim_ < 1 || count_ < 1) throw DomainError("bornology needs positive dimension and seminorm count");
  for (const auto& s : sets_)
    if (s.points.rows() != dim_) throw DomainError("bounded set '" + s.name + "' has wrong dimension");
  std::sort(radii_.begin(), radii_.end());
  if (radii_.empty() || radii_.front() <= 0.0) throw DomainError("bornology radii must be positive");
}

const BoundedSet& Bornology::find(const std::string& name) const {
  for (const auto& s : sets_)
    if (s.name == name) return s;
  throw DomainError("unknown bounded set '" + name + "'");
}

const BoundedSet* Bornology::find_scaled(const std::string& base, double scale) const {
  for (const auto& s : sets_)
    if (s.base == base && s.scale == scale) return &s;
  return nullptr;
}

const BoundedSet* Bornology::designated_superset(const BoundedSet& b, double r) const {
  const double needed = std::abs(r) * b.scale;
  for (double radius : radii_)
    if (radius >= needed) return find_scaled(b.base, radius);
  return nullptr;
}

int default_resolution(int dim) {
  switch (dim) {
    case 1:
      return 3;
    case 2:
      return 65;
    case 3:
      return 17;
    case 4:
      return 9;
    case 5:
      return 5;
    default:
      return 3;
  }
}

Eigen::MatrixXd sphere_cloud(const SeminormFamily& family, int n, int resolution) {
  family.check_index(n);
  const int dim = family.dim();
  const int m = std::max(resolution, 2);
  Eigen::VectorXd inv_w(dim);
  for (int k = 0; k < dim; ++k) {
    const double w = family.weights()(n - 1, k);
    inv_w[k] = w > 0.0 ? 1.0 / w : 1.0;
  }
  std::vector<Eigen::VectorXd> points;
  enumerate_cube_surface(dim, m, [&](const Eigen::VectorXd& s) {
    const Eigen::VectorXd v = inv_w.cwiseProduct(s);
    const double p = family(n, v);
    if (p > 0.0) points.push_back(v / p);
  });
  Eigen::MatrixXd cloud(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) cloud.col(static_cast<Eigen::Index>(j)) = points[j];
  return cloud;
}

Bornology surrogate_bornology(const SeminormFamily& family, const BornologyOptions& options) {
  const int resolution = options.resolution > 0 ? options.resolution : default_resolution(family.dim());
  std::vector<BoundedSet> bases;
  for (int n = 1; n <= family.count(); ++n) {
    BoundedSet s;
    s.name = "sphere_" + std::to_string(n);
    s.base = s.name;
    s.sphere_of = n;
    s.points = sphere_cloud(family, n, resolution);
    bases.push_back(std::move(s));
  }
  if (options.include_unions) {
    Eigen::Index total = 0;
    for (const auto& b : bases) total += b.points.cols();
    BoundedSet u;
    u.name = "union";
    u.base = "union";
    u.points.resize(family.dim(), total);
    Eigen::Index at = 0;
    for (const auto& b : bases) {
      u.points.middleCols(at, b.points.cols()) = b.points;
      at += b.points.cols();
    }
    bases.push_back(std::move(u));
  }
  std::vector<double> radii = options.radii;
  if (std::find(radii.begin(), radii.end(), 1.0) == radii.end()) radii.push_back(1.0);
  std::sort(radii.begin(), radii.end());

  std::vector<BoundedSet> sets;
  for (double r : radii) {
    for (const auto& b : bases) {
      BoundedSet s = b;
      s.scale = r;
      s.name = scaled_name(b.base, r);
      s.points = r * b.points;
      sets.push_back(std::move(s));
    }
  }
  return Bornology(family.space_id(), family.dim(), family.count(), std::move(sets), std::move(radii));
}

bool balanced_hull_contains(const Eigen::MatrixXd& cloud, const Eigen::VectorXd& point, double tol) {
  const double pn = point.norm();
  if (pn == 0.0) return cloud.cols() > 0;
  for (Eigen::Index j = 0; j < cloud.cols(); ++j) {
    const auto c = cloud.col(j);
    const double cc = c.squaredNorm();
    if (cc == 0.0) continue;
    const double s = point.dot(c) / cc;
    if (std::abs(s) > 1.0 + tol) continue;
    if ((point - s * c).norm() <= tol * (1.0 + pn)) return true;
  }
  return false;
}

bool balanced_hull_contains_all(const Eigen::MatrixXd& outer, const Eigen::MatrixXd& inner, double tol) {
  HullIndex index(outer);
  for (Eigen::Index j = 0; j < inner.cols(); ++j)
    if (!index.contains(inner.col(j), tol)) return false;
  return true;
}

BornologyReport validate_bornology(const Bornology& bornology, const SeminormFamily& family) {
  if (bornology.space_id() != family.space_id()) throw SpaceMismatch(family.space_id(), bornology.space_id());
  BornologyReport report;
  const auto& sets = bornology.sets();
  const int dim = bornology.dim();

  for (int k = 0; k < dim; ++k) {
    bool found = false;
    for (const auto& s : sets) {
      for (Eigen::Index j = 0; j < s.points.cols() && !found; ++j) {
        const auto c = s.points.col(j);
        const double lead = std::abs(c[k]);
        if (lead == 0.0) continue;
        bool axis = true;
        for (int i = 0; i < dim; ++i)
          if (i != k && std::abs(c[i]) > 1e-12 * lead) axis = false;
        found = axis;
      }
      if (found) break;
    }
    if (!found) {
      report.covering = false;
      report.uncovered_directions.push_back(k);
    }
  }

  std::vector<HullIndex> indices;
  indices.reserve(sets.size());
  for (const auto& s : sets) indices.emplace_back(s.points);
  auto contains_set = [&](std::size_t outer, const BoundedSet& inner) {
    for (Eigen::Index j = 0; j < inner.points.cols(); ++j)
      if (!indices[outer].contains(inner.points.col(j), 1e-9)) return false;
    return true;
  };

  for (std::size_t a = 0; a < sets.size() && report.directed; ++a) {
    for (std::size_t b = a + 1; b < sets.size() && report.directed; ++b) {
      bool has_upper = false;
      for (std::size_t c = 0; c < sets.size() && !has_upper; ++c)
        has_upper = contains_set(c, sets[a]) && contains_set(c, sets[b]);
      if (!has_upper) {
        report.directed = false;
        report.undirected_pair = std::make_pair(sets[a].name, sets[b].name);
      }
    }
  }

  for (double r : bornology.radii()) {
    ScalingStatus status{r, true, {}};
    for (const auto& s : sets) {
      if (s.scale != 1.0) continue;
      const BoundedSet* c = bornology.designated_superset(s, r);
      if (c == nullptr || !balanced_hull_contains_all(c->points, r * s.points)) {
        status.pass = false;
        status.failing_set = s.name;
        break;
      }
    }
    report.scaling_closed = report.scaling_closed && status.pass;
    report.scaling.push_back(std::move(status));
  }

  for (int n = 1; n <= family.count(); ++n) {
    bool present = false;
    for (const auto& s : sets) {
      if (s.points.cols() == 0) continue;
      bool on_sphere = true;
      for (Eigen::Index j = 0; j < s.points.cols() && on_sphere; ++j)
        on_sphere = std::abs(family(n, s.points.col(j)) - 1.0) <= 1e-9;
      if (on_sphere) {
        present = true;
        break;
      }
    }
    if (!present) report.missing_surrogates.push_back(n);
  }

  report.degenerate_seminorms = family.degenerate();
  report.notes.push_back("compact sets are represented by unit-sphere sample clouds of each seminorm");
  report.notes.push_back("scaling closure is checked at the catalog radii only");
  if (report.degenerate_seminorms)
    report.notes.push_back("some seminorms have kernel directions; their clouds omit those directions");
  return report;
}

}  // namespace graded
