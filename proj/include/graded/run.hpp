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

// Command dispatch for the graded-min tool.

#pragma once

#include <string>
#include <vector>

#include "graded/problem.hpp"
#include "graded/report.hpp"

namespace graded {

/// minimize, ekeland, qiu, ps-check, metric, compat, report.
std::vector<std::string> commands();

/// Runs one command. Negative verdicts are results, not errors. Module
/// failures that leave partial results set `error` on the report; config
/// problems throw ConfigError.
RunReport run(const std::string& command, const ProblemConfig& config);

}  // namespace graded
