// Copyright 2026 The GOAS Authors.
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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "goas/evaluation.hpp"

namespace goas::cli {

// Exit codes of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kRuntimeFailure = 2;

// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

// One row of the comparison produced by `goas report`.
struct ComparisonRow {
  std::string run;
  double auc = 0.0;
  double hter = 0.0;
  double eer = 0.0;
};

std::vector<ComparisonRow> compare_runs(const std::vector<std::filesystem::path>& run_dirs);
nlohmann::json comparison_json(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> comparison_from_json(const nlohmann::json& j);
std::string comparison_table(const std::vector<ComparisonRow>& rows);

// Parses "s:m,s:m" into (sensor, medium) pairs.
std::vector<std::pair<int, int>> parse_combos(const std::string& text);

}  // namespace goas::cli
