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

#include "graded/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "graded/error.hpp"

namespace graded {

using nlohmann::json;

namespace {

constexpr const char* kEmptyMarker = "_empty";

}  // namespace

ReportFormat format_from_string(const std::string& name) {
  if (name == "structured") return ReportFormat::Structured;
  if (name == "tabular") return ReportFormat::Tabular;
  throw ConfigError("--format", "expected 'structured' or 'tabular', got '" + name + "'");
}

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(num(v[k]));
  return a;
}

json claim(double value, double tolerance) { return {{"value", num(value)}, {"tolerance", num(tolerance)}}; }

json to_json(const InfEstimate& inf) {
  return {{"value", num(inf.value)}, {"source", inf.source}, {"samples", inf.samples}};
}

json to_json(const GridSpec& grid) {
  return {{"lo", to_json(grid.box.lo)},
          {"hi", to_json(grid.box.hi)},
          {"per_axis", grid.per_axis},
          {"offset", num(grid.offset)},
          {"points", grid.size()}};
}

json to_json(const VerificationReport& v) {
  json conclusions = json::array();
  for (const auto& c : v.conclusions)
    conclusions.push_back({{"name", c.name}, {"margin", claim(c.margin, -kWitnessSlack)}, {"pass", c.pass}});
  return {{"conclusions", conclusions},
          {"min_margin", claim(v.min_margin, -kWitnessSlack)},
          {"valid", v.valid},
          {"grid", to_json(v.grid)},
          {"surrogate", "strictness is checked on the finite grid only"},
          {"worst_point", to_json(v.worst_point)}};
}

json to_json(const EkelandWitness& w) {
  json trace = json::array();
  for (const auto& t : w.trace)
    trace.push_back({{"iteration", t.iteration},
                     {"previous", num(t.previous)},
                     {"value", num(t.value)},
                     {"penalty", num(t.penalty)},
                     {"radius", num(t.radius)},
                     {"source", t.source}});
  return {{"point", to_json(w.point.coords())},
          {"space", w.point.space_id()},
          {"value", num(w.value)},
          {"start", to_json(w.start)},
          {"start_value", num(w.start_value)},
          {"inf_estimate", to_json(w.inf)},
          {"status", to_string(w.status)},
          {"iterations", w.iterations},
          {"evaluations", w.evaluations},
          {"verification", to_json(w.verification)},
          {"valid", w.valid},
          {"trace", trace}};
}

json to_json(const DualBound& d) {
  json j = {{"set", d.set},          {"n", d.n},        {"value", num(d.value)}, {"bound", num(d.bound)},
            {"tolerance", num(d.tolerance)}, {"pass", d.pass}};
  if (d.proven_bound) j["proven_bound"] = num(*d.proven_bound);
  return j;
}

json to_json(const CriticalCertificate& c) {
  json duals = json::array();
  for (const auto& d : c.dual_bounds) duals.push_back(to_json(d));
  json j = {{"kind", c.kind},
            {c.parameter_name, num(c.parameter)},
            {"point", to_json(c.point.coords())},
            {"start", to_json(c.start)},
            {"value", num(c.value)},
            {"level", {{"value", num(c.level)}, {"source", c.level_source}}},
            {"value_gap", claim(c.value_gap, c.value_tolerance)},
            {"value_ok", c.value_ok},
            {"bound", {{"value", num(c.bound)}, {"rule", c.bound_rule}}},
            {"dual_bounds", duals},
            {"duals_ok", c.duals_ok},
            {"in_critical_set", c.in_critical_set},
            {"notes", c.notes}};
  if (c.witness) j["witness"] = to_json(*c.witness);
  return j;
}

json to_json(const SequenceVerdict& v) {
  json j = {{"name", v.name},
            {"kind", v.kind},
            {"bounded", v.bounded},
            {"level_ok", v.level_ok},
            {"decays", v.decays},
            {"qualifying", v.qualifying},
            {"head_value_max", num(v.head_value_max)},
            {"tail_value_max", num(v.tail_value_max)},
            {"tail_level_gap", num(v.tail_level_gap)},
            {"head_gradient", to_json(v.head_gradient)},
            {"tail_gradient", to_json(v.tail_gradient)}};
  if (v.qualifying) {
    j["cluster"] = v.cluster ? to_json(*v.cluster) : json("none");
    j["cluster_radius"] = num(v.cluster_radius);
  }
  return j;
}

json to_json(const PSReport& r) {
  json seqs = json::array();
  for (const auto& s : r.sequences) seqs.push_back(to_json(s));
  json j = {{"mode", r.mode.name()},
            {"horizon", r.horizon},
            {"tolerances",
             {{"growth", num(r.tolerances.growth)},
              {"level", num(r.tolerances.level)},
              {"decay_ratio", num(r.tolerances.decay_ratio)},
              {"gradient_abs", num(r.tolerances.gradient_abs)},
              {"cluster_radius", num(r.tolerances.cluster_radius)}}},
            {"sequences", seqs},
            {"qualifying", r.qualifying},
            {"verdict", r.pass ? "PASS" : "FAIL"}};
  if (r.mode.at_level) j["level"] = num(r.mode.level);
  if (!r.pass) j["failing_sequence"] = r.failing_sequence;
  return j;
}

json to_json(const DriverResult& r) {
  json trace = json::array();
  for (const auto& s : r.trace)
    trace.push_back({{"i", s.i},
                     {"parameter", num(s.parameter)},
                     {"x", to_json(s.x)},
                     {"value", num(s.value)},
                     {"inf_estimate", num(s.inf_estimate)},
                     {"level_bound", num(s.level_bound)},
                     {"within_level", s.within_level},
                     {"predescent", s.predescent},
                     {"in_region", s.in_region}});
  json j = {{"setting", r.setting},
            {"trace", trace},
            {"inf_estimate", {{"value", num(r.inf_estimate)}, {"source", r.inf_source}}},
            {"ps_failure", r.ps_failure},
            {"region_ok", r.region_ok},
            {"notes", r.notes}};
  j["cluster"] = r.cluster ? to_json(*r.cluster) : json("none");
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  if (r.compat) j["compat"] = to_json(*r.compat);
  if (r.failure) j["failure"] = *r.failure;
  return j;
}

json to_json(const CompatibilityConstants& c) {
  return {{"chart", c.chart_id},
          {"alpha", num(c.alpha)},
          {"beta", num(c.beta)},
          {"region", {{"lo", to_json(c.region.lo)}, {"hi", to_json(c.region.hi)}}},
          {"pairs", c.pairs}};
}

json to_json(const AxiomReport& r) {
  return {{"K", num(r.K)},
          {"radius", num(r.radius)},
          {"worst_ratio", num(r.worst_ratio)},
          {"holds_everywhere", r.holds_everywhere},
          {"first_violation", num(r.first_violation)},
          {"samples", r.samples}};
}

json to_json(const BornologyReport& r) {
  json scaling = json::array();
  for (const auto& s : r.scaling) {
    json e = {{"radius", num(s.radius)}, {"pass", s.pass}};
    if (!s.pass) e["failing_set"] = s.failing_set;
    scaling.push_back(e);
  }
  json j = {{"covering", r.covering},
            {"uncovered_directions", r.uncovered_directions},
            {"directed", r.directed},
            {"scaling", scaling},
            {"scaling_closed", r.scaling_closed},
            {"missing_surrogates", r.missing_surrogates},
            {"degenerate_seminorms", r.degenerate_seminorms},
            {"notes", r.notes},
            {"all_pass", r.all_pass()}};
  if (r.undirected_pair) j["undirected_pair"] = {r.undirected_pair->first, r.undirected_pair->second};
  return j;
}

json to_json(const C1Report& r) {
  json levels = json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"cells", l.cells}, {"spacing", num(l.spacing)}, {"jump", num(l.jump)}});
  json j = {{"levels", levels}, {"worst_jump", num(r.worst_jump)}, {"pass", r.pass}};
  if (r.worst_direction >= 0) {
    j["worst_at"] = to_json(r.worst_at);
    j["worst_direction"] = r.worst_direction;
  }
  return j;
}

json to_json(const PathResult& p) {
  json ladder = json::array();
  for (double v : p.ladder) ladder.push_back(num(v));
  return {{"length", num(p.length)},
          {"optimized", p.optimized},
          {"nodes", p.curve.nodes.size()},
          {"chart", p.curve.chart_id},
          {"ladder", ladder}};
}

// ---------------------------------------------------------------------------
// Emission

namespace {

json document(const RunReport& r) {
  json j = {{"schema", r.schema},
            {"version", r.version},
            {"command", r.command},
            {"config", r.config},
            {"timing", "excluded from structured output"}};
  const bool empty = r.results.is_null() || (r.results.is_object() && r.results.empty()) ||
                     (r.results.is_array() && r.results.empty());
  j["results"] = empty ? json{{kEmptyMarker, true}} : r.results;
  if (r.error) j["error"] = *r.error;
  return j;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool scalar_array(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& e : v)
    if (e.is_object() || e.is_array()) return false;
  return true;
}

void flatten(const json& v, const std::string& path, std::vector<std::array<std::string, 3>>& rows) {
  if (v.is_object()) {
    if (v.empty()) {
      rows.push_back({path, "(empty)", "-"});
      return;
    }
    const bool has_claim = v.contains("value") && v.contains("tolerance") && !v.at("value").is_structured();
    if (has_claim) rows.push_back({path, scalar_text(v.at("value")), scalar_text(v.at("tolerance"))});
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (has_claim && (it.key() == "value" || it.key() == "tolerance")) continue;
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), rows);
    }
    return;
  }
  if (v.is_array()) {
    if (v.empty()) {
      rows.push_back({path, "[]", "-"});
    } else if (scalar_array(v)) {
      std::string text = "[";
      for (std::size_t i = 0; i < v.size(); ++i) text += (i ? ", " : "") + scalar_text(v[i]);
      rows.push_back({path, text + "]", "-"});
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", rows);
    }
    return;
  }
  rows.push_back({path, scalar_text(v), "-"});
}

}  // namespace

std::string emit_report(const RunReport& r, ReportFormat format) {
  if (format == ReportFormat::Structured) return document(r).dump(2) + "\n";
  std::vector<std::array<std::string, 3>> rows;
  rows.push_back({"command", r.command, "-"});
  rows.push_back({"version", r.version, "-"});
  std::ostringstream elapsed;
  elapsed << std::setprecision(6) << r.elapsed_seconds;
  rows.push_back({"timing.elapsed_seconds", elapsed.str(), "-"});
  if (r.error) rows.push_back({"error", *r.error, "-"});
  const json results = document(r).at("results");
  if (results.contains(kEmptyMarker))
    rows.push_back({"results", "(empty)", "-"});
  else
    flatten(results, "results", rows);
  std::size_t width = 8;
  for (const auto& row : rows) width = std::max(width, row[0].size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width) + 2) << "quantity" << "value\ttolerance\n";
  for (const auto& row : rows)
    out << std::left << std::setw(static_cast<int>(width) + 2) << row[0] << row[1] << "\t" << row[2] << "\n";
  return out.str();
}

RunReport parse_report(const std::string& structured) {
  const json j = json::parse(structured);
  RunReport r;
  r.schema = j.at("schema").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  const json& results = j.at("results");
  r.results = results.contains(kEmptyMarker) ? json::object() : results;
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace graded
