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

// graded-min <cmd> --config <path> [--seed S] [--threads T] [--out <path>]
//            [--format structured|tabular]
//
// Exit codes: 0 completed (negative verdicts included), 2 config error,
// 3 execution error.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "graded/error.hpp"
#include "graded/parallel.hpp"
#include "graded/run.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kExecutionExit = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded minimization and critical-point certificates"};
  app.set_version_flag("--version", std::string(graded::kVersion));
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_path;
  std::string format = "structured";
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(graded::commands()));
  app.add_option("--config", config_path, "Problem config (JSON)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--threads", threads, "Worker threads (default: GRADED_MIN_THREADS or hardware)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "structured or tabular")->check(CLI::IsMember({"structured", "tabular"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  graded::RunReport report;
  try {
    if (threads) graded::set_thread_count(*threads);
    graded::ProblemConfig config = graded::load_problem(config_path);
    if (seed) config.seed = *seed;
    report = graded::run(command, config);
  } catch (const graded::ConfigError& e) {
    std::cerr << "graded-min: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "graded-min: " << command << ": " << e.what() << "\n";
    return kExecutionExit;
  }

  const std::string text = graded::emit_report(report, graded::format_from_string(format));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << text)) {
      std::cerr << "graded-min: cannot write " << out_path << "\n";
      return kExecutionExit;
    }
  }
  if (report.error) {
    std::cerr << "graded-min: " << *report.error << "\n";
    return kExecutionExit;
  }
  return 0;
}
