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

#include "terranav/astar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace terranav {

double astar_edge_cost(const GridMap2D& cost, Cell a, Cell b, const AStarOptions& options) {
  const double length = std::hypot(a.col - b.col, a.row - b.row) * cost.resolution();
  return length * (1.0 + options.cost_weight * 0.5 * (cost[a] + cost[b]));
}

std::vector<Cell> astar_plan(const GridMap2D& edge_cost, const GridMap2D& blocking, Cell start, Cell goal,
                             double untraversable, const AStarOptions& options) {
  const GridGeometry& geo = edge_cost.geometry();
  if (!geo.in_bounds(start) || !geo.in_bounds(goal)) {
    throw Error(ErrorCode::kUnreachable, "astar: start or goal outside the map");
  }
  if (blocking[goal] >= untraversable) throw Error(ErrorCode::kUnreachable, "astar: goal cell is untraversable");

  const std::size_t n = geo.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<long> parent(n, -1);
  std::vector<char> closed(n, 0);
  const double res = geo.resolution;
  auto h = [&](Cell c) { return res * std::hypot(c.col - goal.col, c.row - goal.row); };

  using Entry = std::pair<double, std::size_t>;  // (f, index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[geo.index(start)] = 0.0;
  open.push({h(start), geo.index(start)});

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    const Cell cur{static_cast<int>(idx % geo.width), static_cast<int>(idx / geo.width)};
    if (cur == goal) break;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Cell nb{cur.col + dc, cur.row + dr};
        if (!geo.in_bounds(nb) || blocking[nb] >= untraversable) continue;
        const std::size_t ni = geo.index(nb);
        if (closed[ni]) continue;
        const double cand = g[idx] + astar_edge_cost(edge_cost, cur, nb, options);
        if (cand < g[ni]) {
          g[ni] = cand;
          parent[ni] = static_cast<long>(idx);
          open.push({cand + h(nb), ni});
        }
      }
    }
  }

  const std::size_t gi = geo.index(goal);
  if (!std::isfinite(g[gi])) throw Error(ErrorCode::kUnreachable, "astar: goal not reachable");
  std::vector<Cell> path;
  for (long i = static_cast<long>(gi); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    path.push_back({static_cast<int>(i % geo.width), static_cast<int>(i / geo.width)});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Cell> astar_plan(const GridMap2D& cost, Cell start, Cell goal, double untraversable,
                             const AStarOptions& options) {
  return astar_plan(cost, cost, start, goal, untraversable, options);
}

double path_cost(const GridMap2D& cost, const std::vector<Cell>& path, const AStarOptions& options) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += astar_edge_cost(cost, path[i - 1], path[i], options);
  return total;
}

GridMap2D hybrid_cost_map(const GridMap2D& geometric, const TerrainTypeMap& types,
                          const std::map<TerrainClass, double>& penalty) {
  GridMap2D out = geometric;
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    auto it = penalty.find(types.values()[i]);
    if (it != penalty.end()) out.values()[i] += it->second;
  }
  return out;
}

}  // namespace terranav
