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

#include "terranav/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "terranav/random.hpp"

namespace terranav {

TerrainWorld::TerrainWorld(GridMap2D elevation, TerrainTypeMap types, const TraversabilityConfig& trav,
                           std::map<TerrainClass, DisturbanceParams> disturbance,
                           std::vector<Obstacle> obstacles)
    : elevation_(std::move(elevation)),
      types_(std::move(types)),
      trav_(trav),
      disturbance_(std::move(disturbance)),
      obstacles_(std::move(obstacles)) {
  traversability_ = geometric_traversability(elevation_, trav_.weights, trav_.scales, trav_.radius);
  check();
}

TerrainWorld::TerrainWorld(GridMap2D elevation, TerrainTypeMap types, GridMap2D traversability,
                           const TraversabilityConfig& trav,
                           std::map<TerrainClass, DisturbanceParams> disturbance,
                           std::vector<Obstacle> obstacles)
    : elevation_(std::move(elevation)),
      types_(std::move(types)),
      traversability_(std::move(traversability)),
      trav_(trav),
      disturbance_(std::move(disturbance)),
      obstacles_(std::move(obstacles)) {
  check();
}

void TerrainWorld::check() const {
  if (!(types_.geometry() == elevation_.geometry()) || !(traversability_.geometry() == elevation_.geometry())) {
    throw Error(ErrorCode::kInvalidArgument, "terrain layers must share grid geometry");
  }
  for (TerrainClass c : classes_present()) {
    if (disturbance_.count(c) == 0) {
      throw Error(ErrorCode::kConfig,
                  "missing disturbance parameters for terrain '" + std::string(terrain_name(c)) + "'");
    }
  }
}

TerrainClass TerrainWorld::terrain_at(const Vec2& pos) const {
  if (auto c = types_.value_at(pos)) return *c;
  throw Error(ErrorCode::kBoundary, "terrain_at: position outside map");
}

const DisturbanceParams& TerrainWorld::disturbance(TerrainClass c) const {
  auto it = disturbance_.find(c);
  if (it == disturbance_.end()) {
    throw Error(ErrorCode::kConfig, "no disturbance parameters for terrain '" + std::string(terrain_name(c)) + "'");
  }
  return it->second;
}

std::vector<TerrainClass> TerrainWorld::classes_present() const {
  std::set<TerrainClass> seen(types_.values().begin(), types_.values().end());
  return {seen.begin(), seen.end()};
}

bool TerrainWorld::collides(const Vec2& pos, double radius) const {
  return std::any_of(obstacles_.begin(), obstacles_.end(), [&](const Obstacle& o) {
    return (pos - o.center).norm() < radius + o.radius;
  });
}

std::string_view preset_name(WorldPreset p) {
  switch (p) {
    case WorldPreset::kFlat: return "flat";
    case WorldPreset::kHill: return "hill";
    case WorldPreset::kScenario: return "scenario";
  }
  return "unknown";
}

std::optional<WorldPreset> preset_from_name(std::string_view name) {
  for (WorldPreset p : {WorldPreset::kFlat, WorldPreset::kHill, WorldPreset::kScenario}) {
    if (preset_name(p) == name) return p;
  }
  return std::nullopt;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      inside = !inside;
    }
  }
  return inside;
}

TerrainWorld generate_world(const WorldGenConfig& config, std::uint64_t seed) {
  GridGeometry geo;
  geo.resolution = config.resolution;
  geo.width = static_cast<int>(std::lround(config.size_x / config.resolution));
  geo.height = static_cast<int>(std::lround(config.size_y / config.resolution));
  geo.origin = Vec2::Constant(0.5 * config.resolution);
  geo.validate();

  GridMap2D elevation(geo, 0.0);
  TerrainTypeMap types(geo, TerrainClass::kGrass);
  std::vector<Obstacle> obstacles;

  if (config.preset != WorldPreset::kFlat) {
    const HillSpec& hill = config.hill;
    for (int row = 0; row < geo.height; ++row) {
      for (int col = 0; col < geo.width; ++col) {
        const double d2 = (geo.cell_center({col, row}) - hill.center).squaredNorm();
        elevation(col, row) = hill.height * std::exp(-0.5 * d2 / (hill.sigma * hill.sigma));
      }
    }
  }

  if (config.preset == WorldPreset::kScenario) {
    for (int row = 0; row < geo.height; ++row) {
      for (int col = 0; col < geo.width; ++col) {
        if (point_in_polygon(geo.cell_center({col, row}), config.mud_polygon)) types(col, row) = TerrainClass::kMud;
      }
    }

    RandomStream rng = derive_stream(seed, {0x0b57ULL});
    const double margin = 2.0;
    std::uniform_real_distribution<double> ux(margin, config.size_x - margin);
    std::uniform_real_distribution<double> uy(margin, config.size_y - margin);
    for (int attempt = 0; attempt < 10000 && static_cast<int>(obstacles.size()) < config.obstacle_count; ++attempt) {
      const Vec2 c(ux(rng), uy(rng));
      const double r = config.obstacle_radius;
      if ((c - config.start).norm() < config.obstacle_clearance + r) continue;
      if ((c - config.goal).norm() < config.obstacle_clearance + r) continue;
      const bool overlaps = std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) {
        return (o.center - c).norm() < o.radius + r + 1.0;
      });
      if (overlaps) continue;
      obstacles.push_back({c, r, config.obstacle_height});
    }
    for (const Obstacle& o : obstacles) {
      for (int row = 0; row < geo.height; ++row) {
        for (int col = 0; col < geo.width; ++col) {
          if ((geo.cell_center({col, row}) - o.center).norm() <= o.radius) elevation(col, row) += o.height;
        }
      }
    }
  }

  // Map files store float32; quantizing here keeps generated and reloaded worlds identical.
  for (double& v : elevation.values()) v = static_cast<double>(static_cast<float>(v));

  return TerrainWorld(std::move(elevation), std::move(types), config.traversability, config.disturbance,
                      std::move(obstacles));
}

}  // namespace terranav
