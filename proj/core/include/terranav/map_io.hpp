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

#include <string>
#include <vector>

#include "terranav/world.hpp"

namespace terranav {

// Layers as stored on disk.
struct MapFile {
  GridMap2D elevation;
  TerrainTypeMap types;
  GridMap2D traversability;
  std::vector<Obstacle> obstacles;
};

/// Map file layout: one line of JSON header terminated by '\n', followed by
/// the layer payloads in header order. Float layers are little-endian
/// float32, the terrain layer is uint8 labels resolved through the header's
/// label table. Header keys: format, version, resolution, origin, width,
/// height, layers [{name, dtype, offset, bytes}], labels, obstacles.
std::string encode_map(const MapFile& map);
MapFile decode_map(const std::string& bytes);

void write_map(const std::string& path, const MapFile& map);
MapFile read_map(const std::string& path);

MapFile to_map_file(const TerrainWorld& world);
TerrainWorld world_from_map(const MapFile& map, const TraversabilityConfig& trav,
                            std::map<TerrainClass, DisturbanceParams> disturbance);

}  // namespace terranav
