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
#include <string>

#include <nlohmann/json.hpp>

#include "terranav/gp.hpp"
#include "terranav/sim_world.hpp"
#include "terranav/world.hpp"

namespace terranav::cli {

struct GpTrainConfig {
  GpFitOptions fit;
  CollectionConfig collection;
  std::size_t min_samples = 50;  // per terrain class
};

/// Everything a command needs; with the code version it fully determines a run.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::string map_path;     // optional map file; the generator is used when empty
  std::string models_dir;   // defaults to <out>/models
  WorldGenConfig world;
  VehicleParams vehicle;
  MissionSpec mission;
  MissionConfig run;
  GpTrainConfig gp;
};

// Library defaults adjusted for the desk-scale scenario (see README).
ScenarioConfig default_scenario();

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);
// Missing keys keep default_scenario() values; unknown keys are kConfig errors.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

std::string scenario_to_toml(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_toml(const std::string& text);

// TOML unless the extension is .json.
ScenarioConfig load_scenario(const std::string& path);

}  // namespace terranav::cli
