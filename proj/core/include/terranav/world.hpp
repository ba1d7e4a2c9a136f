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
#include <string>
#include <vector>

#include "terranav/dynamics.hpp"
#include "terranav/grid_map.hpp"
#include "terranav/terrain.hpp"

namespace terranav {

struct Obstacle {
  Vec2 center = Vec2::Zero();
  double radius = 0.5;
  double height = 0.6;
};

// Ground-truth slip model of one terrain class.
struct DisturbanceParams {
  double k_vy = 0.0;  // share of lateral force demand turned into v_y error
  double k_vx = 1.0;  // longitudinal efficiency in (0, 1]
  double k_w = 0.0;   // yaw-rate error gain
  double noise_vx = 0.0;
  double noise_vy = 0.0;
  double noise_w = 0.0;

  static DisturbanceParams grass_default() { return {0.0, 1.0, 0.0, 0.01, 0.02, 0.01}; }
  static DisturbanceParams mud_default() { return {0.3, 0.7, 0.2, 0.05, 0.08, 0.05}; }
  static DisturbanceParams none() { return {}; }
};

struct TraversabilityConfig {
  TraversabilityWeights weights;
  TraversabilityScales scales;
  int radius = 1;
};

/// Co-registered elevation, terrain-type and geometric traversability layers
/// plus per-class disturbance parameters and the obstacle list. Immutable
/// once built; safe for concurrent reads.
class TerrainWorld {
 public:
  TerrainWorld(GridMap2D elevation, TerrainTypeMap types, const TraversabilityConfig& trav,
               std::map<TerrainClass, DisturbanceParams> disturbance, std::vector<Obstacle> obstacles);
  // Uses a precomputed traversability layer (e.g. read from a map file).
  TerrainWorld(GridMap2D elevation, TerrainTypeMap types, GridMap2D traversability,
               const TraversabilityConfig& trav, std::map<TerrainClass, DisturbanceParams> disturbance,
               std::vector<Obstacle> obstacles);

  const GridMap2D& elevation() const { return elevation_; }
  const TerrainTypeMap& types() const { return types_; }
  const GridMap2D& traversability() const { return traversability_; }
  const TraversabilityConfig& traversability_config() const { return trav_; }
  double t_max() const { return trav_.weights.t_max; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const GridGeometry& geometry() const { return elevation_.geometry(); }

  // Positions where terrain attitude is defined.
  bool supports(const Vec2& pos) const { return has_normal_support(elevation_, pos); }
  Attitude attitude(const VehicleState& s) const { return terrain_attitude(elevation_, s.position(), s.yaw); }
  // Throws kBoundary outside the map.
  TerrainClass terrain_at(const Vec2& pos) const;
  const DisturbanceParams& disturbance(TerrainClass c) const;
  const std::map<TerrainClass, DisturbanceParams>& disturbances() const { return disturbance_; }
  std::vector<TerrainClass> classes_present() const;

  // True when a disc of `radius` around pos touches any obstacle footprint.
  bool collides(const Vec2& pos, double radius) const;

 private:
  void check() const;

  GridMap2D elevation_;
  TerrainTypeMap types_;
  GridMap2D traversability_;
  TraversabilityConfig trav_;
  std::map<TerrainClass, DisturbanceParams> disturbance_;
  std::vector<Obstacle> obstacles_;
};

enum class WorldPreset { kFlat, kHill, kScenario };

std::string_view preset_name(WorldPreset p);
std::optional<WorldPreset> preset_from_name(std::string_view name);

struct HillSpec {
  Vec2 center{20.0, 24.0};
  double height = 2.5;  // m
  double sigma = 4.0;   // m, Gaussian bump width
};

// Synthetic world description; deterministic per seed.
struct WorldGenConfig {
  WorldPreset preset = WorldPreset::kScenario;
  double size_x = 40.0;
  double size_y = 30.0;
  double resolution = 0.5;
  HillSpec hill;
  std::vector<Vec2> mud_polygon{{13.0, 3.0}, {27.0, 3.0}, {27.0, 20.0}, {13.0, 20.0}};
  int obstacle_count = 6;
  double obstacle_radius = 0.6;
  double obstacle_height = 0.6;
  double obstacle_clearance = 4.0;  // keep-out radius around start and goal
  Vec2 start{3.0, 12.0};
  Vec2 goal{37.0, 12.0};
  TraversabilityConfig traversability;
  std::map<TerrainClass, DisturbanceParams> disturbance{
      {TerrainClass::kGrass, DisturbanceParams::grass_default()},
      {TerrainClass::kMud, DisturbanceParams::mud_default()}};
};

TerrainWorld generate_world(const WorldGenConfig& config, std::uint64_t seed);

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon);

}  // namespace terranav
