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

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace graded {

/// Seeded generator with platform-independent real draws.
///
/// std::uniform_real_distribution is implementation-defined, so reals are
/// built directly from the 53 high bits of the engine output. Reports are
/// replayed byte-for-byte from a seed, which needs this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Eigen::VectorXd uniform_vector(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) v[k] = uniform(lo[k], hi[k]);
    return v;
  }

  /// Uniform draw from the cube [-r, r]^dim.
  Eigen::VectorXd cube(Eigen::Index dim, double r) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = uniform(-r, r);
    return v;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace graded
