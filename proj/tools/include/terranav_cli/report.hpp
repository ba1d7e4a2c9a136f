// Copyright 2026 The terranav Authors
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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "terranav/sim_world.hpp"

namespace terranav::cli {

struct TrialRow {
  Stack stack = Stack::kProposed;
  int trial = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kTimeout;
  std::string reason;
  double path_length = 0.0;
  double duration = 0.0;
  std::optional<Vec2> failure_position;
  std::optional<TerrainClass> failure_terrain;
};

TrialRow make_row(const TrialLog& log, int trial);

struct StackSummary {
  int trials = 0;
  int successes = 0;
  std::optional<double> mean_path_length;  // over successful trials
  std::map<Outcome, int> outcomes;
  int mud_failures = 0;  // failures whose final position is on mud
};

struct LatencySummary {
  std::size_t count = 0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// Nearest-rank percentiles over the samples (count 0 leaves zeros).
LatencySummary summarize_latency(std::vector<double> samples_ms);

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::vector<TrialRow> rows;
  std::map<Stack, StackSummary> summary;
  std::map<Stack, LatencySummary> plan_latency;
  std::map<Stack, LatencySummary> track_latency;
};

// Aggregates are a pure function of the rows.
std::map<Stack, StackSummary> summarize(const std::vector<TrialRow>& rows);

nlohmann::ordered_json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

// Plain-text results table with one line per stack.
std::string format_table(const ExperimentReport& report);

}  // namespace terranav::cli
