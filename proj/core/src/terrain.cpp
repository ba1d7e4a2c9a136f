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

#include "terranav/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace terranav {

std::string_view terrain_name(TerrainClass c) {
  switch (c) {
    case TerrainClass::kGrass: return "grass";
    case TerrainClass::kMud: return "mud";
  }
  return "unknown";
}

std::optional<TerrainClass> terrain_from_name(std::string_view name) {
  for (TerrainClass c : kAllTerrainClasses) {
    if (terrain_name(c) == name) return c;
  }
  return std::nullopt;
}

Mat3 rotation_body_to_world(const Attitude& att) {
  const double cf = std::cos(att.roll), sf = std::sin(att.roll);
  const double ct = std::cos(att.pitch), st = std::sin(att.pitch);
  const double cp = std::cos(att.yaw), sp = std::sin(att.yaw);
  Mat3 r;
  r << cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf,
       sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf,
       -st, ct * sf, ct * cf;
  return r;
}

namespace {

bool interior_with_margin(const GridGeometry& g, const Vec2& grid_pos) {
  if (g.width < 3 || g.height < 3) return false;
  return grid_pos.x() >= 1.0 && grid_pos.y() >= 1.0 && grid_pos.x() <= g.width - 2.0 &&
         grid_pos.y() <= g.height - 2.0;
}

Vec2 node_gradient(const GridMap2D& z, int col, int row) {
  const double inv = 1.0 / (2.0 * z.resolution());
  return {(z(col + 1, row) - z(col - 1, row)) * inv, (z(col, row + 1) - z(col, row - 1)) * inv};
}

}  // namespace

bool has_normal_support(const GridMap2D& elevation, const Vec2& pos) {
  return pos.allFinite() && interior_with_margin(elevation.geometry(), elevation.geometry().to_grid(pos));
}

Vec3 surface_normal(const GridMap2D& elevation, const Vec2& pos) {
  const GridGeometry& geo = elevation.geometry();
  const Vec2 g = geo.to_grid(pos);
  if (!pos.allFinite() || !interior_with_margin(geo, g)) {
    throw Error(ErrorCode::kBoundary, "surface_normal: position outside map interior");
  }
  const int c0 = std::min(static_cast<int>(std::floor(g.x())), geo.width - 3);
  const int r0 = std::min(static_cast<int>(std::floor(g.y())), geo.height - 3);
  const double fx = g.x() - c0;
  const double fy = g.y() - r0;

  const Vec2 grad = (1.0 - fx) * (1.0 - fy) * node_gradient(elevation, c0, r0) +
                    fx * (1.0 - fy) * node_gradient(elevation, c0 + 1, r0) +
                    (1.0 - fx) * fy * node_gradient(elevation, c0, r0 + 1) +
                    fx * fy * node_gradient(elevation, c0 + 1, r0 + 1);
  return Vec3(-grad.x(), -grad.y(), 1.0).normalized();
}

Attitude attitude_from_normal(const Vec3& normal, double yaw) {
  const Vec3 n = normal.normalized();
  if (!n.allFinite() || n.z() <= std::cos(kMaxSlopeAngle)) {
    throw Error(ErrorCode::kSlopeCap, "attitude_from_normal: terrain steeper than slope cap");
  }
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  // Normal expressed in the yaw-aligned frame equals (s(th) c(ph), -s(ph), c(th) c(ph)).
  const double nx = cy * n.x() + sy * n.y();
  const double ny = -sy * n.x() + cy * n.y();
  Attitude att;
  att.roll = std::asin(std::clamp(-ny, -1.0, 1.0));
  att.pitch = std::atan2(nx, n.z());
  att.yaw = yaw;
  return att;
}

void TraversabilityWeights::validate() const {
  if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0 || std::abs(w1 + w2 + w3 - 1.0) > 1e-9 || !(t_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "traversability weights must be non-negative, sum to 1, and t_max > 0");
  }
}

GridMap2D geometric_traversability(const GridMap2D& elevation, const TraversabilityWeights& w,
                                   const TraversabilityScales& scales, int radius) {
  w.validate();
  if (radius < 1) throw Error(ErrorCode::kInvalidArgument, "neighborhood radius must be >= 1");
  const int width = elevation.width();
  const int height = elevation.height();
  const double res = elevation.resolution();
  GridMap2D out(elevation.geometry(), 0.0);

  auto derivative = [&](int i, int n, auto&& z_at) {
    if (n == 1) return 0.0;
    if (i == 0) return (z_at(1) - z_at(0)) / res;
    if (i == n - 1) return (z_at(n - 1) - z_at(n - 2)) / res;
    return (z_at(i + 1) - z_at(i - 1)) / (2.0 * res);
  };

  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const double dzdx = derivative(col, width, [&](int c) { return elevation(c, row); });
      const double dzdy = derivative(row, height, [&](int r) { return elevation(col, r); });
      const double slope = std::atan(std::hypot(dzdx, dzdy));

      const double zc = elevation(col, row);
      double sum = 0.0, sum_sq = 0.0, step = 0.0;
      int count = 0;
      for (int r = std::max(0, row - radius); r <= std::min(height - 1, row + radius); ++r) {
        for (int c = std::max(0, col - radius); c <= std::min(width - 1, col + radius); ++c) {
          // Centered on zc so the statistics do not depend on the absolute datum.
          const double dz = elevation(c, r) - zc;
          sum += dz;
          sum_sq += dz * dz;
          step = std::max(step, std::abs(dz));
          ++count;
        }
      }
      const double mean = sum / count;
      const double roughness = std::sqrt(std::max(0.0, sum_sq / count - mean * mean));

      const double ts = std::min(slope / scales.max_slope, 1.0);
      const double tr = std::min(roughness / scales.max_roughness, 1.0);
      const double th = std::min(step / scales.max_step, 1.0);
      out(col, row) = std::min(w.w1 * ts + w.w2 * tr + w.w3 * th, w.t_max);
    }
  }
  return out;
}

CostPatch submap(const GridMap2D& cost, const Vec2& center, int s, double fill) {
  if (s < 1 || s % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "submap size must be odd and >= 1");
  const GridGeometry& geo = cost.geometry();
  const Cell mid = geo.cell_at(center);
  const int half = s / 2;
  CostPatch patch;
  patch.size = s;
  patch.values.reserve(static_cast<std::size_t>(s) * s);
  patch.centers.reserve(static_cast<std::size_t>(s) * s);
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc) {
      const Cell c{mid.col + dc, mid.row + dr};
      patch.values.push_back(geo.in_bounds(c) ? cost[c] : fill);
      patch.centers.push_back(geo.cell_center(c));
    }
  }
  return patch;
}

}  // namespace terranav
