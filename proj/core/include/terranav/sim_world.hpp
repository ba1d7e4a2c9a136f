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

#include "terranav/astar.hpp"
#include "terranav/gp.hpp"
#include "terranav/planner.hpp"
#include "terranav/random.hpp"
#include "terranav/tracker.hpp"
#include "terranav/world.hpp"

namespace terranav {

/// Ground-truth step: dynamics step() plus the slip disturbance of the terrain
/// class under the vehicle and Gaussian velocity noise scaled by sqrt(dt).
/// `u` is the input actually applied. Throws kBoundary when the state has no
/// terrain support.
VehicleState true_step(const VehicleState& s, const ControlInput& u, const TerrainWorld& world,
                       const VehicleParams& p, double dt, RandomStream& rng);

// Low-pass filtered uniform random driving, standing in for a human driver.
struct CollectionConfig {
  double duration = 600.0;  // s of driving
  double sim_dt = 0.02;
  double log_dt = 0.1;
  double time_constant = 1.0;  // s, input low-pass filter
  double edge_margin = 2.0;    // m, respawn once closer to the map edge
};

struct TrainingData {
  std::map<TerrainClass, GpDataset> by_class;
  std::size_t total = 0;
  std::size_t respawns = 0;
};

/// Drives the world with the random policy, labels one-step residuals and
/// splits the samples by the terrain class at each sample's input position.
/// Segments end (and the vehicle respawns at a random free pose) on leaving
/// the margin, collisions and simulation faults.
TrainingData collect_training_data(const TerrainWorld& world, const VehicleParams& p, const CollectionConfig& cfg,
                                   std::uint64_t seed);

enum class Stack { kProposed, kBaseline1, kBaseline2 };
enum class Outcome { kSuccess, kCollision, kRollover, kTimeout };

std::string_view stack_name(Stack s);
std::optional<Stack> stack_from_name(std::string_view name);
std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

struct MissionSpec {
  VehicleState start;
  Vec2 goal = Vec2::Zero();
  double goal_radius = 1.0;
  double time_limit = 60.0;

  void validate() const;
};

struct BaselineConfig {
  double lookahead = 1.5;        // m
  double speed = 2.0;            // m/s reference
  double speed_gain = 1.0;       // 1/s
  double untraversable = 0.8;    // T_geo at or above which a cell is blocked
  double inflation = -1.0;       // m around blocked cells; negative selects the footprint radius
  double mud_penalty = 0.8;      // semantic cost added on mud for baseline2
  AStarOptions astar;
};

struct MissionConfig {
  double sim_dt = 0.02;
  double control_period = 0.1;
  double plan_period = 1.0 / 3.0;
  PlannerConfig planner;
  MppiConfig mppi;
  BaselineConfig baseline;

  void validate() const;
};

struct TrialRecord {
  double t = 0.0;
  VehicleState state;
  ControlInput command;  // applied during the following sim step
  TerrainClass terrain = TerrainClass::kGrass;
};

struct PlanRecord {
  double t = 0.0;
  int selected = -1;  // candidate index (proposed) or path length in cells (baselines)
  bool fallback = false;
  int safe_count = 0;
  double cost = 0.0;
};

struct TrialLog {
  Stack stack = Stack::kProposed;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kTimeout;
  std::string reason;  // e.g. "left_map", "unreachable", "time_limit"
  double duration = 0.0;
  double path_length = 0.0;
  std::optional<Vec2> failure_position;
  std::optional<TerrainClass> failure_terrain;
  std::vector<TrialRecord> records;
  std::vector<PlanRecord> plans;
  // Wall-clock latencies, kept out of the serialized log.
  std::vector<double> plan_ms;
  std::vector<double> track_ms;

  bool success() const { return outcome == Outcome::kSuccess; }
};

// Sum of distances between consecutive recorded positions.
double path_length(const std::vector<TrialRecord>& records);

/// Runs one closed-loop mission. The proposed stack replans at plan_period
/// and tracks with MPPI every control_period; the baselines replan A* on
/// T_geo (baseline1) or T_geo plus a mud penalty (baseline2) and track with
/// pure pursuit. Failures are outcomes, never exceptions.
TrialLog run_mission(const TerrainWorld& world, const MissionSpec& mission, Stack stack, const GpRegistry& registry,
                     const VehicleParams& p, const MissionConfig& cfg, std::uint64_t seed);

// Metadata and outcome (no timings, so equal runs serialize identically).
std::string trial_log_to_json(const TrialLog& log);
// t, x, y, yaw, vx, vy, wz, steer, accel, terrain
std::string trial_log_to_csv(const TrialLog& log);

}  // namespace terranav
