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

#include "graded/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "graded/random.hpp"

namespace graded {

double Functional::operator()(const GradedPoint& x) const {
  if (x.space_id() != space_id) throw SpaceMismatch(space_id, x.space_id());
  return eval(x.coords());
}

namespace {

double checked_eval(const Functional& f, const Eigen::VectorXd& x, double t) {
  const double value = f.eval(x);
  if (!std::isfinite(value)) throw NumericalError("functional '" + f.name + "' is not finite near x", t);
  return value;
}

double central(const Functional& f, const Eigen::VectorXd& x, const Eigen::VectorXd& h, double t) {
  return (checked_eval(f, x + t * h, t) - checked_eval(f, x - t * h, t)) / (2.0 * t);
}

}  // namespace

double gateaux_derivative(const Functional& f, const SeminormFamily& family, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& h, const DifferenceScheme& scheme) {
  if (x.size() != f.dim || h.size() != f.dim) throw DomainError("derivative arguments have wrong dimension");
  if (!(scheme.base_step > 0.0)) throw DomainError("difference step must be positive");
  if (scheme.prefer_analytic && f.has_gradient()) return f.gradient(x).dot(h);
  const double t = scheme.base_step * (1.0 + family(1, x));
  const double coarse = central(f, x, h, t);
  const double fine = central(f, x, h, 0.5 * t);
  return (4.0 * fine - coarse) / 3.0;
}

double gateaux_derivative(const Functional& f, const SeminormFamily& family, const GradedPoint& x,
                          const GradedPoint& h, const DifferenceScheme& scheme) {
  if (x.space_id() != f.space_id) throw SpaceMismatch(f.space_id, x.space_id());
  x.require_same_space(h);
  return gateaux_derivative(f, family, x.coords(), h.coords(), scheme);
}

DifferentialRep differential(const Functional& f, const SeminormFamily& family, const Eigen::VectorXd& x,
                             const DifferenceScheme& scheme) {
  DifferentialRep rep{f.space_id, Eigen::VectorXd(f.dim), x};
  if (scheme.prefer_analytic && f.has_gradient()) {
    rep.basis_values = f.gradient(x);
    return rep;
  }
  for (int k = 0; k < f.dim; ++k)
    rep.basis_values[k] = gateaux_derivative(f, family, x, Eigen::VectorXd::Unit(f.dim, k), scheme);
  return rep;
}

DifferentialRep differential(const Functional& f, const SeminormFamily& family, const GradedPoint& x,
                             const DifferenceScheme& scheme) {
  if (x.space_id() != f.space_id) throw SpaceMismatch(f.space_id, x.space_id());
  return differential(f, family, x.coords(), scheme);
}

double cloud_sup(const DifferentialRep& L, const Eigen::MatrixXd& cloud) {
  if (cloud.cols() == 0) return 0.0;
  return (L.basis_values.transpose() * cloud).cwiseAbs().maxCoeff();
}

double dual_seminorm(const DifferentialRep& L, const Bornology& b, const std::string& set_name, int n) {
  if (L.space_id != b.space_id()) throw SpaceMismatch(b.space_id(), L.space_id);
  if (n < 1 || n > b.count()) throw DomainError("dual seminorm index " + std::to_string(n) + " out of range");
  return cloud_sup(L, b.find(set_name).points);
}

double max_dual_seminorm(const DifferentialRep& L, const Bornology& b) {
  if (L.space_id != b.space_id()) throw SpaceMismatch(b.space_id(), L.space_id);
  double best = 0.0;
  for (const auto& s : b.sets()) best = std::max(best, cloud_sup(L, s.points));
  return best;
}

ResolutionCheck dual_resolution_check(const DifferentialRep& L, const SeminormFamily& family, int n,
                                      int resolution, double tolerance) {
  ResolutionCheck check{};
  check.resolution = resolution;
  check.doubled_resolution = 2 * resolution - 1;
  check.sup = cloud_sup(L, sphere_cloud(family, n, resolution));
  check.doubled_sup = cloud_sup(L, sphere_cloud(family, n, check.doubled_resolution));
  check.converged = std::abs(check.doubled_sup - check.sup) < tolerance;
  return check;
}

C1Report check_c1(const Functional& f, const SeminormFamily& family, const Box& region, const C1Options& options) {
  const int dim = f.dim;
  if (region.dim() != dim) throw DomainError("continuity region has wrong dimension");
  C1Report report;

  // Base points of the sample lines, fixed across refinement levels.
  Rng rng(options.seed);
  std::vector<Eigen::VectorXd> anchors{region.center()};
  for (int l = 1; l < options.lines; ++l) anchors.push_back(rng.uniform_vector(region.lo, region.hi));
  if (dim == 1) anchors.resize(1);

  for (int level = 0; level <= options.refinements; ++level) {
    const int cells = options.cells << level;
    C1Level out{cells, 0.0, 0.0};
    for (int axis = 0; axis < dim; ++axis) {
      const double width = region.hi[axis] - region.lo[axis];
      const double spacing = width / cells;
      out.spacing = std::max(out.spacing, spacing);
      for (const auto& anchor : anchors) {
        Eigen::VectorXd x = anchor;
        Eigen::VectorXd previous;
        for (int c = 0; c < cells; ++c) {
          x[axis] = region.lo[axis] + (c + 0.5) * spacing;
          const Eigen::VectorXd current = differential(f, family, x, options.scheme).basis_values;
          if (c > 0) {
            Eigen::Index dir = 0;
            const double jump = (current - previous).cwiseAbs().maxCoeff(&dir);
            if (jump > out.jump) out.jump = jump;
            if (jump > report.worst_jump) {
              report.worst_jump = jump;
              report.worst_at = x;
              report.worst_direction = static_cast<int>(dir);
            }
          }
          previous = current;
        }
      }
    }
    report.levels.push_back(out);
  }

  const double coarse = report.levels.front().jump;
  const double fine = report.levels.back().jump;
  report.pass = fine <= options.absolute_tolerance || fine <= options.shrink * coarse;
  return report;
}

}  // namespace graded
