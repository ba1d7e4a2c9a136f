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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "terranav/gp.hpp"
#include "terranav/sim_world.hpp"
#include "terranav_cli/config.hpp"
#include "terranav_cli/report.hpp"

namespace terranav::cli {

namespace fs = std::filesystem;

// Independent sub-seed for a (tag, index) pair of a master seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0);

// World from the configured map file, else generated with `world_seed`.
TerrainWorld scenario_world(const ScenarioConfig& cfg, std::uint64_t world_seed);
// Obstacle layout of trial t (the map file is reused as is when configured).
std::uint64_t trial_world_seed(const ScenarioConfig& cfg, int trial);

fs::path models_dir(const ScenarioConfig& cfg, const fs::path& out);
fs::path model_path(const fs::path& dir, TerrainClass c);
// Loads one model per terrain class in `world`; kConfig when a file is missing.
GpRegistry load_registry(const fs::path& dir, const TerrainWorld& world);

// Writes <out>/map.tnm for the scenario world of cfg.seed.
fs::path cmd_genmap(const ScenarioConfig& cfg, const fs::path& out);

struct TrainSummary {
  std::map<TerrainClass, std::size_t> samples;
  std::map<TerrainClass, std::array<double, kGpOutputDim>> final_lml;
  std::vector<fs::path> files;
};

/// Collects driving data on the scenario world, fits one GP per terrain
/// class and writes <models>/gp_<class>.json. Throws kInsufficientData when a
/// class has fewer than cfg.gp.min_samples samples.
TrainSummary cmd_train(const ScenarioConfig& cfg, const fs::path& out);

struct RunOptions {
  std::vector<Stack> stacks{Stack::kProposed, Stack::kBaseline1, Stack::kBaseline2};
  int trials = 10;
};

/// Runs every (trial, stack) pair and writes trial logs, plot tables and
/// <out>/report.json. Trials run in parallel on the current thread count.
ExperimentReport cmd_run(const ScenarioConfig& cfg, const RunOptions& options, const fs::path& out);

// Reads <out>/report.json, recomputes the aggregates and returns the table.
std::string cmd_report(const fs::path& out);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace terranav::cli
