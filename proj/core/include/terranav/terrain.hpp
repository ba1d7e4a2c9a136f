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

#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "terranav/grid_map.hpp"

namespace terranav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Z-Y-X Euler angles of the body frame with respect to the world frame.
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

// R^W_B for roll/pitch/yaw in Z-Y-X order.
Mat3 rotation_body_to_world(const Attitude& att);

// Hard cap on terrain slope that attitude_from_normal accepts.
inline constexpr double kMaxSlopeAngle = 85.0 * std::numbers::pi / 180.0;

/// Unit normal of the elevation surface at a world position.
///
/// Elevation gradients are taken by central differences at the four grid
/// nodes surrounding `pos` and bilinearly blended. The query must leave one
/// cell of margin to every map edge, otherwise ErrorCode::kBoundary is thrown.
Vec3 surface_normal(const GridMap2D& elevation, const Vec2& pos);

// True when surface_normal() is defined at pos.
bool has_normal_support(const GridMap2D& elevation, const Vec2& pos);

/// Roll and pitch such that the body z-axis is aligned with `normal` for the
/// given yaw. Throws ErrorCode::kSlopeCap when the normal is steeper than
/// kMaxSlopeAngle.
Attitude attitude_from_normal(const Vec3& normal, double yaw);

inline Attitude terrain_attitude(const GridMap2D& elevation, const Vec2& pos, double yaw) {
  return attitude_from_normal(surface_normal(elevation, pos), yaw);
}

struct TraversabilityWeights {
  double w1 = 0.5;   // slope
  double w2 = 0.25;  // roughness
  double w3 = 0.25;  // step height
  double t_max = 1.0;

  void validate() const;
};

// Per-feature normalizers; each feature is divided by its scale and clipped to [0, 1].
struct TraversabilityScales {
  double max_slope = 30.0 * std::numbers::pi / 180.0;  // rad
  double max_roughness = 0.1;                          // m (std-dev)
  double max_step = 0.3;                               // m
};

/// Geometric traversability layer T_geo = min(w1 Ts + w2 Tr + w3 Th, t_max).
///
/// Slope comes from central differences (one sided on the border), roughness
/// is the population standard deviation of elevation over the
/// (2 radius + 1)^2 neighborhood and step height is the largest absolute
/// height difference to a neighbor in the same window. Windows are clipped to
/// the map.
GridMap2D geometric_traversability(const GridMap2D& elevation, const TraversabilityWeights& w,
                                   const TraversabilityScales& scales, int radius);

// Square patch of a cost layer, stored row-major with rows along world y.
struct CostPatch {
  int size = 1;
  std::vector<double> values;
  std::vector<Vec2> centers;  // world coordinates of each cell center

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * size + col]; }
};

/// s x s window of `cost` centered on the cell containing `center`. Cells
/// outside the map take `fill`. Throws kInvalidArgument unless s is odd and >= 1.
CostPatch submap(const GridMap2D& cost, const Vec2& center, int s, double fill);

}  // namespace terranav
