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

#include "graded/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "graded/error.hpp"
#include "graded/expression.hpp"

namespace graded {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Library

const std::vector<std::pair<std::string, const char*>>& library() {
  static const std::vector<std::pair<std::string, const char*>> entries = {
      {"quad1", R"({
        "space": {"dim": 1, "count": 2},
        "functional": {"name": "quadratic", "coefficients": [2]},
        "region": {"lo": [-2], "hi": [2]},
        "start": [0.7]})"},
      {"quad2", R"({
        "space": {"dim": 2, "count": 2},
        "functional": {"name": "quadratic", "coefficients": [2, 3]},
        "region": {"lo": [-2, -2], "hi": [2, 2]},
        "start": [0.6, 0.1]})"},
      {"quad3", R"({
        "space": {"dim": 3, "count": 2},
        "functional": {"name": "quadratic", "coefficients": [2, 3, 4]},
        "region": {"lo": [-2, -2, -2], "hi": [2, 2, 2]},
        "start": [0.7, 0.05, 0.02]})"},
      {"arctan-flat", R"({
        "space": {"dim": 1, "count": 2},
        "functional": {"name": "arctan"},
        "region": {"lo": [-4], "hi": [4]},
        "start": [0.0],
        "compat": {"thetas": [1.5, 3]},
        "ps_check": {"mode": "PS_c", "level": 1.5707963267948966}})"},
      {"kink-abs", R"({
        "space": {"dim": 1, "count": 2},
        "functional": {"name": "abs"},
        "region": {"lo": [-2], "hi": [2]},
        "start": [0.5]})"},
      {"conformal-1d", R"({
        "space": {"dim": 1, "count": 2},
        "functional": {"name": "quadratic", "coefficients": [1], "center": [1]},
        "structure": {"kind": "conformal", "kappa": 1.0},
        "region": {"lo": [-3], "hi": [3]},
        "start": [0.5],
        "minimize": {"setting": "manifold"}})"},
      {"rosen-graded", R"({
        "space": {"dim": 2, "count": 2},
        "functional": {"name": "rosenbrock"},
        "region": {"lo": [-2, -2], "hi": [2, 2]},
        "start": [-1.2, 1.0],
        "ekeland": {"a": 32},
        "compat": {"thetas": [5, 6]},
        "qiu": {"eta": 32}})"},
  };
  return entries;
}

const std::vector<std::string> kFunctionals = {"quadratic", "arctan", "abs", "rosenbrock", "expression"};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

[[noreturn]] void unknown_name(const std::string& field, const std::string& kind, const std::string& given,
                               std::vector<std::string> known) {
  std::vector<std::string> ranked = known;
  std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
    return edit_distance(given, x) < edit_distance(given, y);
  });
  std::string msg = "unknown " + kind + " '" + given + "'; did you mean '" + ranked.front() + "'? known: ";
  for (std::size_t i = 0; i < known.size(); ++i) msg += (i ? ", " : "") + known[i];
  throw ConfigError(field, msg);
}

// ---------------------------------------------------------------------------
// Reading

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == std::floor(v.get<double>())))
      throw ConfigError(field(key), "expected an integer");
    return v.is_number_integer() ? v.get<long long>() : static_cast<long long>(v.get<double>());
  }

  int small_integer(const std::string& key, int fallback) {
    const long long v = integer(key, fallback);
    if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(field(key), "out of range");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(field(key), "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(field(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    return to_numbers(j_.at(key), field(key));
  }

  std::optional<Eigen::VectorXd> vector(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto v = to_numbers(j_.at(key), field(key));
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::optional<Eigen::MatrixXd> matrix(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(field(key), "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < v.size(); ++r) rows.push_back(to_numbers(v[r], field(key) + "[" + std::to_string(r) + "]"));
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw ConfigError(field(key), "rows have different lengths");
      for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    if (!has(key)) return Section(empty, field(key));
    return Section(j_.at(key), field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

 private:
  static std::vector<double> to_numbers(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError(name, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(name, "expected an array of numbers");
      out.push_back(e.get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(name, "entries must be finite");
    }
    return out;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

json vec(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

}  // namespace

std::vector<std::string> library_problems() {
  std::vector<std::string> names;
  for (const auto& [name, _] : library()) names.push_back(name);
  return names;
}

std::vector<std::string> functional_names() { return kFunctionals; }

json library_entry(const std::string& name) {
  for (const auto& [key, text] : library())
    if (key == name) return json::parse(text);
  unknown_name("problem", "problem", name, library_problems());
}

ProblemConfig load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("parse error: ") + e.what());
  }
  return parse_problem(j);
}

ProblemConfig parse_problem(const json& input) {
  if (!input.is_object()) throw ConfigError("<root>", "must be an object");
  json merged = input;
  ProblemConfig c;
  if (input.contains("problem")) {
    if (!input.at("problem").is_string()) throw ConfigError("problem", "expected a string");
    c.problem = input.at("problem").get<std::string>();
    merged = library_entry(c.problem);
    merged.merge_patch(input);
  }
  Section root(merged, "");
  root.has("problem");

  {
    Section s = root.child("space");
    c.space.id = s.string("id", "F");
    c.space.dim = s.small_integer("dim", 0);
    c.space.count = s.small_integer("count", 1);
    const std::string combine = s.string("combine", "sup");
    try {
      c.space.combine = combine_from_string(combine);
    } catch (const Error&) {
      unknown_name(s.field("combine"), "combine rule", combine, {"sup", "sum", "l2"});
    }
    c.space.weights = s.matrix("weights");
    if (c.space.weights) {
      if (!s.has("dim")) c.space.dim = static_cast<int>(c.space.weights->cols());
      if (!s.has("count")) c.space.count = static_cast<int>(c.space.weights->rows());
    }
    s.finish();
    require(c.space.dim >= 1, s.field("dim"), "must be a positive integer");
    require(c.space.count >= 1, s.field("count"), "must be a positive integer (N >= 1)");
    require(!c.space.id.empty(), s.field("id"), "must be non-empty");
    if (c.space.weights) {
      require(c.space.weights->rows() == c.space.count && c.space.weights->cols() == c.space.dim, s.field("weights"),
              "must be count x dim");
      require((c.space.weights->array() >= 0.0).all(), s.field("weights"), "must be non-negative");
    }
  }
  const int dim = c.space.dim;

  {
    Section s = root.child("bornology");
    c.bornology.resolution = s.small_integer("resolution", 0);
    c.bornology.radii = s.numbers("radii", {1.0, 2.0});
    c.bornology.include_unions = s.boolean("unions", true);
    s.finish();
    require(c.bornology.resolution >= 0, s.field("resolution"), "must be non-negative");
    require(c.bornology.resolution == 0 || c.bornology.resolution >= 2, s.field("resolution"),
            "needs at least two points per edge");
    require(!c.bornology.radii.empty(), s.field("radii"), "must be non-empty");
    for (double r : c.bornology.radii) require(r > 0.0, s.field("radii"), "must be positive");
  }

  {
    json fj = root.has("functional") ? root.raw("functional") : json::object();
    if (fj.is_string()) fj = json{{"name", fj}};
    Section s(fj, "functional");
    c.functional.name = s.string("name", "quadratic");
    if (std::find(kFunctionals.begin(), kFunctionals.end(), c.functional.name) == kFunctionals.end())
      unknown_name(s.field("name"), "functional", c.functional.name, kFunctionals);
    c.functional.coefficients = s.numbers("coefficients", {});
    c.functional.center = s.numbers("center", {});
    c.functional.expression = s.string("expression", "");
    if (s.has("gradient")) {
      const json& g = s.raw("gradient");
      require(g.is_array(), s.field("gradient"), "expected an array of expressions");
      for (const auto& e : g) {
        require(e.is_string(), s.field("gradient"), "expected an array of expressions");
        c.functional.gradient.push_back(e.get<std::string>());
      }
    }
    c.functional.lower_bound = s.optional_number("lower_bound");
    s.finish();
    const auto& f = c.functional;
    if (f.name == "quadratic") {
      require(f.coefficients.empty() || static_cast<int>(f.coefficients.size()) == dim, s.field("coefficients"),
              "needs one coefficient per coordinate");
      require(f.center.empty() || static_cast<int>(f.center.size()) == dim, s.field("center"),
              "needs one entry per coordinate");
    } else {
      require(f.coefficients.empty(), s.field("coefficients"), "only applies to the quadratic functional");
      require(f.center.empty(), s.field("center"), "only applies to the quadratic functional");
    }
    if (f.name == "rosenbrock") require(dim >= 2, s.field("name"), "rosenbrock needs dim >= 2");
    if (f.name == "expression") {
      require(!f.expression.empty(), s.field("expression"), "required for the expression functional");
      require(f.gradient.empty() || static_cast<int>(f.gradient.size()) == dim, s.field("gradient"),
              "needs one expression per coordinate");
    } else {
      require(f.expression.empty(), s.field("expression"), "only applies to the expression functional");
      require(f.gradient.empty(), s.field("gradient"), "only applies to the expression functional");
    }
  }

  {
    Section s = root.child("structure");
    c.structure.kind = s.string("kind", "flat");
    if (c.structure.kind != "flat" && c.structure.kind != "conformal")
      unknown_name(s.field("kind"), "structure", c.structure.kind, {"flat", "conformal"});
    c.structure.kappa = s.number("kappa", 1.0);
    c.structure.chart = s.string("chart", "identity");
    if (c.structure.chart != "identity" && c.structure.chart != "affine" && c.structure.chart != "sinh")
      unknown_name(s.field("chart"), "chart", c.structure.chart, {"identity", "affine", "sinh"});
    c.structure.scale = s.number("scale", 1.0);
    c.structure.matrix = s.matrix("matrix");
    c.structure.offset = s.vector("offset");
    s.finish();
    require(c.structure.kappa >= 0.0, s.field("kappa"), "must be non-negative");
    require(c.structure.scale > 0.0, s.field("scale"), "must be positive");
    if (c.structure.chart == "affine") {
      require(c.structure.matrix.has_value(), s.field("matrix"), "required for an affine chart");
      require(c.structure.matrix->rows() == dim && c.structure.matrix->cols() == dim, s.field("matrix"),
              "must be dim x dim");
      if (c.structure.offset) require(c.structure.offset->size() == dim, s.field("offset"), "must have dim entries");
    } else {
      require(!c.structure.matrix && !c.structure.offset, s.field("matrix"), "only applies to an affine chart");
    }
  }

  {
    Section s = root.child("region");
    const double half = s.number("half_width", 2.0);
    require(half > 0.0, s.field("half_width"), "must be positive");
    c.region = Box::cube(dim, half);
    if (auto lo = s.vector("lo")) c.region.lo = *lo;
    if (auto hi = s.vector("hi")) c.region.hi = *hi;
    s.finish();
    require(c.region.lo.size() == dim, s.field("lo"), "must have dim entries");
    require(c.region.hi.size() == dim, s.field("hi"), "must have dim entries");
    require((c.region.lo.array() < c.region.hi.array()).all(), "region", "box is empty (need lo < hi)");
  }

  if (auto start = root.vector("start")) {
    c.start = *start;
    require(c.start.size() == dim, "start", "must have dim entries");
  } else {
    c.start = c.region.center();
  }
  {
    const long long seed = root.integer("seed", 1);
    require(seed >= 0, "seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }

  {
    Section s = root.child("search");
    EVPConfig& e = c.search;
    e.max_iterations = s.small_integer("max_iterations", e.max_iterations);
    e.samples = s.small_integer("samples", e.samples);
    e.inner_max = s.small_integer("inner_max", e.inner_max);
    e.shrink = s.number("shrink", e.shrink);
    e.tolerance = s.number("tolerance", e.tolerance);
    e.initial_radius = s.number("initial_radius", e.initial_radius);
    e.min_radius = s.number("min_radius", e.min_radius);
    e.floor = s.number("floor", e.floor);
    e.grid_half_width = s.number("grid_half_width", e.grid_half_width);
    e.grid_points = s.small_integer("grid_points", e.grid_points);
    e.polish = s.boolean("polish", e.polish);
    e.polish_passes = s.small_integer("polish_passes", e.polish_passes);
    e.strict_hypotheses = s.boolean("strict_hypotheses", e.strict_hypotheses);
    e.inf_samples = s.small_integer("inf_samples", e.inf_samples);
    s.finish();
    try {
      e.validate();
    } catch (const ConfigError& err) {
      const std::string what = err.what();
      throw ConfigError(s.field(err.field()), what.substr(what.find("': ") + 3));
    }
  }

  {
    Section s = root.child("difference");
    c.difference.base_step = s.number("base_step", c.difference.base_step);
    c.difference.prefer_analytic = s.boolean("prefer_analytic", c.difference.prefer_analytic);
    s.finish();
    require(c.difference.base_step > 0.0, s.field("base_step"), "must be positive");
  }

  {
    Section s = root.child("path");
    c.path.nodes = s.small_integer("nodes", c.path.nodes);
    c.path.sweeps = s.small_integer("sweeps", c.path.sweeps);
    c.path.golden_iterations = s.small_integer("golden_iterations", c.path.golden_iterations);
    c.path.force_optimize = s.boolean("force_optimize", c.path.force_optimize);
    s.finish();
    require(c.path.nodes >= 2, s.field("nodes"), "must be at least 2");
    require(c.path.sweeps >= 0, s.field("sweeps"), "must be non-negative");
    require(c.path.golden_iterations >= 1, s.field("golden_iterations"), "must be positive");
  }

  {
    Section s = root.child("c1");
    c.c1.cells = s.small_integer("cells", c.c1.cells);
    c.c1.refinements = s.small_integer("refinements", c.c1.refinements);
    c.c1.lines = s.small_integer("lines", c.c1.lines);
    c.c1.absolute_tolerance = s.number("absolute_tolerance", c.c1.absolute_tolerance);
    c.c1.shrink = s.number("shrink", c.c1.shrink);
    s.finish();
    require(c.c1.cells >= 2, s.field("cells"), "must be at least 2");
    require(c.c1.refinements >= 1, s.field("refinements"), "must be positive");
    require(c.c1.lines >= 1, s.field("lines"), "must be positive");
    require(c.c1.absolute_tolerance >= 0.0, s.field("absolute_tolerance"), "must be non-negative");
    require(c.c1.shrink > 0.0 && c.c1.shrink <= 1.0, s.field("shrink"), "must lie in (0, 1]");
  }

  {
    Section s = root.child("ekeland");
    c.ekeland.a = s.number("a", c.ekeland.a);
    c.ekeland.b = s.number("b", c.ekeland.b);
    c.ekeland.metric = s.string("metric", c.ekeland.metric);
    c.ekeland.n = s.small_integer("n", c.ekeland.n);
    s.finish();
    require(c.ekeland.a > 0.0, s.field("a"), "must be positive");
    require(c.ekeland.b > 0.0, s.field("b"), "must be positive");
    if (c.ekeland.metric != "graded" && c.ekeland.metric != "seminorm" && c.ekeland.metric != "finsler")
      unknown_name(s.field("metric"), "metric", c.ekeland.metric, {"graded", "seminorm", "finsler"});
    require(c.ekeland.n >= 1 && c.ekeland.n <= c.space.count, s.field("n"), "must lie in 1..count");
  }

  {
    Section s = root.child("qiu");
    c.qiu.eta = s.number("eta", c.qiu.eta);
    if (s.has("lambda")) {
      const json& l = s.raw("lambda");
      if (l.is_number())
        c.qiu.lambdas.assign(static_cast<std::size_t>(c.space.count), l.get<double>());
      else
        c.qiu.lambdas = s.numbers("lambda", {});
    }
    c.qiu.index = s.small_integer("index", c.qiu.index);
    s.finish();
    require(c.qiu.eta > 0.0, s.field("eta"), "must be positive");
    require(c.qiu.lambdas.empty() || static_cast<int>(c.qiu.lambdas.size()) >= c.space.count, s.field("lambda"),
            "needs at least count entries");
    for (double l : c.qiu.lambdas) require(l > 0.0, s.field("lambda"), "must be positive");
    require(c.qiu.index >= 0 && c.qiu.index <= c.space.count, s.field("index"), "must lie in 1..count (0 for count)");
  }

  {
    Section s = root.child("minimize");
    auto& m = c.minimize;
    m.setting = s.string("setting", m.setting);
    if (m.setting != "flat" && m.setting != "manifold")
      unknown_name(s.field("setting"), "setting", m.setting, {"flat", "manifold"});
    m.i_max = s.small_integer("i_max", m.i_max);
    m.cluster_radius = s.number("cluster_radius", m.cluster_radius);
    m.dual_tolerance = s.number("dual_tolerance", m.dual_tolerance);
    m.value_tolerance = s.number("value_tolerance", m.value_tolerance);
    m.predescent_rounds = s.small_integer("predescent_rounds", m.predescent_rounds);
    s.finish();
    require(m.i_max >= 4, s.field("i_max"), "must be at least 4");
    require(m.cluster_radius > 0.0, s.field("cluster_radius"), "must be positive");
    require(m.dual_tolerance >= 0.0, s.field("dual_tolerance"), "must be non-negative");
    require(m.value_tolerance >= 0.0, s.field("value_tolerance"), "must be non-negative");
    require(m.predescent_rounds >= 1, s.field("predescent_rounds"), "must be positive");
  }

  {
    Section s = root.child("ps_check");
    auto& p = c.ps_check;
    p.mode = s.string("mode", p.mode);
    if (p.mode != "PS" && p.mode != "PS_c") unknown_name(s.field("mode"), "mode", p.mode, {"PS", "PS_c"});
    p.level = s.number("level", p.level);
    p.horizon = s.small_integer("horizon", p.horizon);
    p.descent = s.boolean("descent", p.descent);
    p.setting = s.string("setting", p.setting);
    if (p.setting != "flat" && p.setting != "manifold")
      unknown_name(s.field("setting"), "setting", p.setting, {"flat", "manifold"});
    p.tolerances.growth = s.number("growth", p.tolerances.growth);
    p.tolerances.level = s.number("level_tolerance", p.tolerances.level);
    p.tolerances.decay_ratio = s.number("decay_ratio", p.tolerances.decay_ratio);
    p.tolerances.gradient_abs = s.number("gradient_abs", p.tolerances.gradient_abs);
    p.tolerances.cluster_radius = s.number("cluster_radius", p.tolerances.cluster_radius);
    s.finish();
    require(p.horizon >= 16, s.field("horizon"), "must be at least 16");
    require(p.tolerances.growth >= 1.0, s.field("growth"), "must be at least 1");
    require(p.tolerances.level > 0.0, s.field("level_tolerance"), "must be positive");
    require(p.tolerances.decay_ratio > 0.0 && p.tolerances.decay_ratio < 1.0, s.field("decay_ratio"),
            "must lie in (0, 1)");
    require(p.tolerances.gradient_abs >= 0.0, s.field("gradient_abs"), "must be non-negative");
    require(p.tolerances.cluster_radius > 0.0, s.field("cluster_radius"), "must be positive");
  }

  {
    Section s = root.child("metric");
    c.metric.x = s.vector("x");
    c.metric.y = s.vector("y");
    s.finish();
    if (c.metric.x) require(c.metric.x->size() == dim, s.field("x"), "must have dim entries");
    if (c.metric.y) require(c.metric.y->size() == dim, s.field("y"), "must have dim entries");
  }

  {
    Section s = root.child("compat");
    c.compat.thetas = s.numbers("thetas", c.compat.thetas);
    c.compat.K = s.number("K", c.compat.K);
    c.compat.grid = s.small_integer("grid", c.compat.grid);
    c.compat.near_pairs = s.small_integer("near_pairs", c.compat.near_pairs);
    s.finish();
    for (double t : c.compat.thetas) require(t > 0.0, s.field("thetas"), "must be positive");
    require(c.compat.K > 1.0, s.field("K"), "must exceed 1");
    require(c.compat.grid >= 2, s.field("grid"), "must be at least 2");
    require(c.compat.near_pairs >= 0, s.field("near_pairs"), "must be non-negative");
  }

  root.finish();
  return c;
}

json to_json(const ProblemConfig& c) {
  json j;
  if (!c.problem.empty()) j["problem"] = c.problem;
  j["space"] = {{"id", c.space.id}, {"dim", c.space.dim}, {"count", c.space.count},
                {"combine", to_string(c.space.combine)}};
  if (c.space.weights) j["space"]["weights"] = mat(*c.space.weights);
  j["bornology"] = {{"resolution", c.bornology.resolution},
                    {"radii", c.bornology.radii},
                    {"unions", c.bornology.include_unions}};
  json f = {{"name", c.functional.name}};
  if (!c.functional.coefficients.empty()) f["coefficients"] = c.functional.coefficients;
  if (!c.functional.center.empty()) f["center"] = c.functional.center;
  if (!c.functional.expression.empty()) f["expression"] = c.functional.expression;
  if (!c.functional.gradient.empty()) f["gradient"] = c.functional.gradient;
  if (c.functional.lower_bound) f["lower_bound"] = *c.functional.lower_bound;
  j["functional"] = f;
  json s = {{"kind", c.structure.kind}, {"kappa", c.structure.kappa}, {"chart", c.structure.chart},
            {"scale", c.structure.scale}};
  if (c.structure.matrix) s["matrix"] = mat(*c.structure.matrix);
  if (c.structure.offset) s["offset"] = vec(*c.structure.offset);
  j["structure"] = s;
  j["region"] = {{"lo", vec(c.region.lo)}, {"hi", vec(c.region.hi)}};
  j["start"] = vec(c.start);
  j["seed"] = c.seed;
  const EVPConfig& e = c.search;
  j["search"] = {{"max_iterations", e.max_iterations},
                 {"samples", e.samples},
                 {"inner_max", e.inner_max},
                 {"shrink", e.shrink},
                 {"tolerance", e.tolerance},
                 {"initial_radius", e.initial_radius},
                 {"min_radius", e.min_radius},
                 {"floor", e.floor},
                 {"grid_half_width", e.grid_half_width},
                 {"grid_points", e.grid_points},
                 {"polish", e.polish},
                 {"polish_passes", e.polish_passes},
                 {"strict_hypotheses", e.strict_hypotheses},
                 {"inf_samples", e.inf_samples}};
  j["difference"] = {{"base_step", c.difference.base_step}, {"prefer_analytic", c.difference.prefer_analytic}};
  j["path"] = {{"nodes", c.path.nodes},
               {"sweeps", c.path.sweeps},
               {"golden_iterations", c.path.golden_iterations},
               {"force_optimize", c.path.force_optimize}};
  j["c1"] = {{"cells", c.c1.cells},
             {"refinements", c.c1.refinements},
             {"lines", c.c1.lines},
             {"absolute_tolerance", c.c1.absolute_tolerance},
             {"shrink", c.c1.shrink}};
  j["ekeland"] = {{"a", c.ekeland.a}, {"b", c.ekeland.b}, {"metric", c.ekeland.metric}, {"n", c.ekeland.n}};
  j["qiu"] = {{"eta", c.qiu.eta}, {"index", c.qiu.index}};
  if (!c.qiu.lambdas.empty()) j["qiu"]["lambda"] = c.qiu.lambdas;
  j["minimize"] = {{"setting", c.minimize.setting},
                   {"i_max", c.minimize.i_max},
                   {"cluster_radius", c.minimize.cluster_radius},
                   {"dual_tolerance", c.minimize.dual_tolerance},
                   {"value_tolerance", c.minimize.value_tolerance},
                   {"predescent_rounds", c.minimize.predescent_rounds}};
  const auto& p = c.ps_check;
  j["ps_check"] = {{"mode", p.mode},
                   {"level", p.level},
                   {"horizon", p.horizon},
                   {"descent", p.descent},
                   {"setting", p.setting},
                   {"growth", p.tolerances.growth},
                   {"level_tolerance", p.tolerances.level},
                   {"decay_ratio", p.tolerances.decay_ratio},
                   {"gradient_abs", p.tolerances.gradient_abs},
                   {"cluster_radius", p.tolerances.cluster_radius}};
  j["metric"] = json::object();
  if (c.metric.x) j["metric"]["x"] = vec(*c.metric.x);
  if (c.metric.y) j["metric"]["y"] = vec(*c.metric.y);
  j["compat"] = {{"thetas", c.compat.thetas},
                 {"K", c.compat.K},
                 {"grid", c.compat.grid},
                 {"near_pairs", c.compat.near_pairs}};
  return j;
}

// ---------------------------------------------------------------------------
// Building

SeminormFamily build_family(const ProblemConfig& c) {
  if (c.space.weights) return SeminormFamily::from_table(c.space.id, c.space.combine, *c.space.weights);
  return SeminormFamily::weighted(c.space.id, c.space.dim, c.space.count, c.space.combine);
}

Functional build_functional(const ProblemConfig& c) {
  const int dim = c.space.dim;
  const FunctionalDecl& d = c.functional;
  Functional f;
  f.name = c.problem.empty() ? d.name : c.problem;
  f.space_id = c.space.id;
  f.dim = dim;
  if (d.name == "quadratic") {
    const Eigen::VectorXd a = d.coefficients.empty()
                                  ? Eigen::VectorXd::Ones(dim)
                                  : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(d.coefficients.data(), dim));
    const Eigen::VectorXd x0 = d.center.empty()
                                   ? Eigen::VectorXd::Zero(dim)
                                   : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(d.center.data(), dim));
    f.eval = [a, x0](const Eigen::VectorXd& x) { return (a.array() * (x - x0).array().square()).sum(); };
    f.gradient = [a, x0](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return 2.0 * a.array() * (x - x0).array();
    };
    if ((a.array() >= 0.0).all()) f.lower_bound = 0.0;
  } else if (d.name == "arctan") {
    f.eval = [](const Eigen::VectorXd& x) { return std::atan(x[0]); };
    f.gradient = [dim](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
      g[0] = 1.0 / (1.0 + x[0] * x[0]);
      return g;
    };
    f.lower_bound = -std::numbers::pi / 2.0;
  } else if (d.name == "abs") {
    f.eval = [](const Eigen::VectorXd& x) { return x.cwiseAbs().sum(); };
    f.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
    };
    f.lower_bound = 0.0;
  } else if (d.name == "rosenbrock") {
    f.eval = [](const Eigen::VectorXd& x) {
      double total = 0.0;
      for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
        const double u = 1.0 - x[k];
        const double v = x[k + 1] - x[k] * x[k];
        total += u * u + 100.0 * v * v;
      }
      return total;
    };
    f.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
        const double v = x[k + 1] - x[k] * x[k];
        g[k] += -2.0 * (1.0 - x[k]) - 400.0 * x[k] * v;
        g[k + 1] += 200.0 * v;
      }
      return g;
    };
    f.lower_bound = 0.0;
  } else {
    try {
      const Expression e = Expression::parse(d.expression, dim);
      f.eval = [e](const Eigen::VectorXd& x) { return e(x); };
      if (!d.gradient.empty()) {
        std::vector<Expression> parts;
        for (const auto& g : d.gradient) parts.push_back(Expression::parse(g, dim));
        f.gradient = [parts](const Eigen::VectorXd& x) -> Eigen::VectorXd {
          Eigen::VectorXd g(static_cast<Eigen::Index>(parts.size()));
          for (std::size_t k = 0; k < parts.size(); ++k) g[static_cast<Eigen::Index>(k)] = parts[k](x);
          return g;
        };
      }
    } catch (const DomainError& err) {
      throw ConfigError("functional.expression", err.what());
    }
  }
  if (d.lower_bound) f.lower_bound = d.lower_bound;
  return f;
}

Bornology build_bornology(const ProblemConfig& c, const SeminormFamily& family) {
  return surrogate_bornology(family, c.bornology);
}

FinslerStructure build_structure(const ProblemConfig& c, const SeminormFamily& family) {
  const StructureDecl& s = c.structure;
  std::vector<Chart> atlas;
  try {
    if (s.chart == "identity")
      atlas.push_back(Chart::identity("chart0", c.region));
    else if (s.chart == "affine")
      atlas.push_back(Chart::affine("chart0", c.region, *s.matrix,
                                    s.offset ? *s.offset : Eigen::VectorXd::Zero(c.space.dim)));
    else
      atlas.push_back(Chart::sinh_warp("chart0", c.region, s.scale));
  } catch (const DomainError& err) {
    throw ConfigError("structure.chart", err.what());
  }
  return FinslerStructure(family, std::move(atlas), s.kind == "flat" ? TangentRule::Flat : TangentRule::Conformal,
                          s.kappa);
}

Setting build_setting(const ProblemConfig& c, const std::string& kind) {
  const SeminormFamily family = build_family(c);
  Setting s = kind == "manifold" ? Setting::manifold(build_structure(c, family))
                                 : Setting::flat(family, build_bornology(c, family));
  s.path = c.path;
  s.dual_resolution = c.bornology.resolution;
  return s;
}

}  // namespace graded
