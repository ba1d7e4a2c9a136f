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

#include <map>
#include <vector>

#include "terranav/grid_map.hpp"

namespace terranav {

struct AStarOptions {
  double cost_weight = 10.0;  // lambda_c in step * (1 + lambda_c * mean endpoint cost)
};

// Traversal cost of the edge between two adjacent cells.
double astar_edge_cost(const GridMap2D& cost, Cell a, Cell b, const AStarOptions& options);

/// 8-connected A* over `cost`; cells with cost >= untraversable are blocked
/// (the start cell is always expandable). Euclidean distance is the
/// heuristic, which never overestimates since every edge factor is >= 1.
/// Throws kUnreachable when the goal is blocked or disconnected.
std::vector<Cell> astar_plan(const GridMap2D& cost, Cell start, Cell goal, double untraversable,
                             const AStarOptions& options = {});

// Same search with edge costs from `edge_cost` and blocking decided by `blocking`.
std::vector<Cell> astar_plan(const GridMap2D& edge_cost, const GridMap2D& blocking, Cell start, Cell goal,
                             double untraversable, const AStarOptions& options = {});

double path_cost(const GridMap2D& cost, const std::vector<Cell>& path, const AStarOptions& options = {});

// Geometric cost plus a fixed semantic penalty per terrain class.
GridMap2D hybrid_cost_map(const GridMap2D& geometric, const TerrainTypeMap& types,
                          const std::map<TerrainClass, double>& penalty);

}  // namespace terranav
