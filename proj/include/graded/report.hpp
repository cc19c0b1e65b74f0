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

// Run reports and their structured (JSON) and tabular encodings.
//
// Structured output has sorted keys and no wall-clock data, so identical
// config and seed give byte-identical bytes. Non-finite numbers are written
// as the strings "inf", "-inf" and "nan".

#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "graded/bornology.hpp"
#include "graded/calculus.hpp"
#include "graded/ekeland.hpp"
#include "graded/finsler.hpp"
#include "graded/psmin.hpp"

namespace graded {

inline constexpr const char* kReportSchema = "graded-min/report/1";
inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { Structured, Tabular };

/// Throws ConfigError("--format") for other names.
ReportFormat format_from_string(const std::string& name);

struct RunReport {
  std::string command;
  /// Resolved config; enough to rerun without the original file.
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  std::string version = kVersion;
  std::string schema = kReportSchema;
  /// Wall-clock seconds. Only the tabular form shows it.
  double elapsed_seconds = 0.0;
  /// Set when the command could not complete; results hold partial data.
  std::optional<std::string> error;

  bool operator==(const RunReport& other) const {
    return command == other.command && config == other.config && results == other.results &&
           version == other.version && schema == other.schema && error == other.error;
  }
};

std::string emit_report(const RunReport& report, ReportFormat format);
/// Inverse of the structured encoding.
RunReport parse_report(const std::string& structured);

nlohmann::json num(double v);
nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json claim(double value, double tolerance);

nlohmann::json to_json(const InfEstimate& inf);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const VerificationReport& v);
nlohmann::json to_json(const EkelandWitness& w);
nlohmann::json to_json(const DualBound& d);
nlohmann::json to_json(const CriticalCertificate& c);
nlohmann::json to_json(const SequenceVerdict& v);
nlohmann::json to_json(const PSReport& r);
nlohmann::json to_json(const DriverResult& r);
nlohmann::json to_json(const CompatibilityConstants& c);
nlohmann::json to_json(const AxiomReport& r);
nlohmann::json to_json(const BornologyReport& r);
nlohmann::json to_json(const C1Report& r);
nlohmann::json to_json(const PathResult& p);

}  // namespace graded
