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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "terranav/error.hpp"

namespace terranav {

using Vec2 = Eigen::Vector2d;

struct Cell {
  int col = 0;  // along world x
  int row = 0;  // along world y

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Geometry shared by every co-registered layer. `origin` is the world
// position of the center of cell (0, 0); cells are axis aligned squares.
struct GridGeometry {
  double resolution = 0.5;
  Vec2 origin = Vec2::Zero();
  int width = 1;
  int height = 1;

  void validate() const {
    if (!(resolution > 0.0) || width < 1 || height < 1) {
      throw Error(ErrorCode::kInvalidArgument, "grid geometry: resolution must be > 0 and size >= 1");
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }

  // Continuous cell coordinates, integer values at cell centers.
  Vec2 to_grid(const Vec2& world) const { return (world - origin) / resolution; }

  Vec2 cell_center(Cell c) const {
    return origin + resolution * Vec2(c.col, c.row);
  }

  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height;
  }

  // Each cell owns the half-open square [center - res/2, center + res/2).
  Cell cell_at(const Vec2& world) const {
    const Vec2 g = to_grid(world);
    return {static_cast<int>(std::floor(g.x() + 0.5)), static_cast<int>(std::floor(g.y() + 0.5))};
  }

  std::optional<Cell> find_cell(const Vec2& world) const {
    const Cell c = cell_at(world);
    if (!in_bounds(c)) return std::nullopt;
    return c;
  }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * width + c.col;
  }

  friend bool operator==(const GridGeometry& a, const GridGeometry& b) {
    return a.resolution == b.resolution && a.origin == b.origin && a.width == b.width &&
           a.height == b.height;
  }
};

// Dense row-major layer. Immutable after construction in normal use; the
// mutable accessors exist for builders.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(const GridGeometry& geometry, T fill) : geometry_(geometry) {
    geometry_.validate();
    values_.assign(geometry_.size(), fill);
  }
  Grid(const GridGeometry& geometry, std::vector<T> values)
      : geometry_(geometry), values_(std::move(values)) {
    geometry_.validate();
    if (values_.size() != geometry_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "grid: value count does not match geometry");
    }
  }

  const GridGeometry& geometry() const { return geometry_; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }
  double resolution() const { return geometry_.resolution; }

  const T& operator()(int col, int row) const { return values_[geometry_.index({col, row})]; }
  T& operator()(int col, int row) { return values_[geometry_.index({col, row})]; }
  const T& operator[](Cell c) const { return values_[geometry_.index(c)]; }
  T& operator[](Cell c) { return values_[geometry_.index(c)]; }

  std::optional<T> value_at(const Vec2& world) const {
    if (auto c = geometry_.find_cell(world)) return (*this)[*c];
    return std::nullopt;
  }

  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }

 private:
  GridGeometry geometry_;
  std::vector<T> values_;
};

using GridMap2D = Grid<double>;

enum class TerrainClass : std::uint8_t { kGrass = 0, kMud = 1 };

inline constexpr int kTerrainClassCount = 2;
inline constexpr TerrainClass kAllTerrainClasses[] = {TerrainClass::kGrass, TerrainClass::kMud};

std::string_view terrain_name(TerrainClass c);
std::optional<TerrainClass> terrain_from_name(std::string_view name);

using TerrainTypeMap = Grid<TerrainClass>;

}  // namespace terranav
