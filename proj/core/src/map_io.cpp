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

#include "terranav/map_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace terranav {

namespace {

static_assert(std::endian::native == std::endian::little, "map files assume a little-endian host");

void append_float_layer(std::string& out, const GridMap2D& layer) {
  for (double v : layer.values()) {
    const float f = static_cast<float>(v);
    char buf[sizeof(float)];
    std::memcpy(buf, &f, sizeof(float));
    out.append(buf, sizeof(float));
  }
}

GridMap2D read_float_layer(const std::string& bytes, std::size_t offset, const GridGeometry& geo) {
  std::vector<double> values(geo.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    float f;
    std::memcpy(&f, bytes.data() + offset + i * sizeof(float), sizeof(float));
    values[i] = f;
  }
  return GridMap2D(geo, std::move(values));
}

}  // namespace

std::string encode_map(const MapFile& map) {
  using nlohmann::json;
  const GridGeometry& geo = map.elevation.geometry();
  if (!(map.types.geometry() == geo) || !(map.traversability.geometry() == geo)) {
    throw Error(ErrorCode::kInvalidArgument, "map layers must share geometry");
  }
  const std::size_t n = geo.size();
  const std::size_t float_bytes = n * sizeof(float);

  json header;
  header["format"] = "terranav.map";
  header["version"] = 1;
  header["resolution"] = geo.resolution;
  header["origin"] = {geo.origin.x(), geo.origin.y()};
  header["width"] = geo.width;
  header["height"] = geo.height;
  header["layers"] = json::array({
      {{"name", "elevation"}, {"dtype", "float32"}, {"offset", 0}, {"bytes", float_bytes}},
      {{"name", "traversability"}, {"dtype", "float32"}, {"offset", float_bytes}, {"bytes", float_bytes}},
      {{"name", "terrain_type"}, {"dtype", "uint8"}, {"offset", 2 * float_bytes}, {"bytes", n}},
  });
  json labels = json::array();
  for (TerrainClass c : kAllTerrainClasses) {
    labels.push_back({{"value", static_cast<int>(c)}, {"name", std::string(terrain_name(c))}});
  }
  header["labels"] = std::move(labels);
  json obstacles = json::array();
  for (const Obstacle& o : map.obstacles) {
    obstacles.push_back({{"x", o.center.x()}, {"y", o.center.y()}, {"radius", o.radius}, {"height", o.height}});
  }
  header["obstacles"] = std::move(obstacles);

  std::string out = header.dump();
  out.push_back('\n');
  append_float_layer(out, map.elevation);
  append_float_layer(out, map.traversability);
  for (TerrainClass c : map.types.values()) out.push_back(static_cast<char>(c));
  return out;
}

MapFile decode_map(const std::string& bytes) {
  using nlohmann::json;
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw Error(ErrorCode::kConfig, "map file: missing header");
  try {
    const json header = json::parse(bytes.substr(0, newline));
    if (header.at("format") != "terranav.map" || header.at("version") != 1) {
      throw Error(ErrorCode::kConfig, "map file: unsupported format");
    }
    GridGeometry geo;
    geo.resolution = header.at("resolution").get<double>();
    geo.origin = Vec2(header.at("origin").at(0).get<double>(), header.at("origin").at(1).get<double>());
    geo.width = header.at("width").get<int>();
    geo.height = header.at("height").get<int>();
    geo.validate();

    std::map<int, TerrainClass> label_table;
    for (const auto& l : header.at("labels")) {
      const auto c = terrain_from_name(l.at("name").get<std::string>());
      if (!c) throw Error(ErrorCode::kConfig, "map file: unknown terrain label");
      label_table[l.at("value").get<int>()] = *c;
    }

    const std::size_t base = newline + 1;
    MapFile map;
    bool have_elev = false, have_trav = false, have_type = false;
    for (const auto& layer : header.at("layers")) {
      const std::string name = layer.at("name");
      const std::size_t offset = base + layer.at("offset").get<std::size_t>();
      const std::size_t size = layer.at("bytes").get<std::size_t>();
      const std::string dtype = layer.at("dtype");
      const std::size_t expected = geo.size() * (dtype == "float32" ? sizeof(float) : 1);
      if (size != expected || offset + size > bytes.size()) {
        throw Error(ErrorCode::kConfig, "map file: truncated layer '" + name + "'");
      }
      if (name == "elevation") {
        map.elevation = read_float_layer(bytes, offset, geo);
        have_elev = true;
      } else if (name == "traversability") {
        map.traversability = read_float_layer(bytes, offset, geo);
        have_trav = true;
      } else if (name == "terrain_type") {
        std::vector<TerrainClass> labels(geo.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
          auto it = label_table.find(static_cast<unsigned char>(bytes[offset + i]));
          if (it == label_table.end()) throw Error(ErrorCode::kConfig, "map file: label outside table");
          labels[i] = it->second;
        }
        map.types = TerrainTypeMap(geo, std::move(labels));
        have_type = true;
      }
    }
    if (!have_elev || !have_trav || !have_type) throw Error(ErrorCode::kConfig, "map file: missing layer");
    for (const auto& o : header.at("obstacles")) {
      map.obstacles.push_back({Vec2(o.at("x").get<double>(), o.at("y").get<double>()),
                               o.at("radius").get<double>(), o.at("height").get<double>()});
    }
    return map;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("map file: malformed header: ") + e.what());
  }
}

void write_map(const std::string& path, const MapFile& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  const std::string bytes = encode_map(map);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

MapFile read_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_map(ss.str());
}

MapFile to_map_file(const TerrainWorld& world) {
  return {world.elevation(), world.types(), world.traversability(), world.obstacles()};
}

TerrainWorld world_from_map(const MapFile& map, const TraversabilityConfig& trav,
                            std::map<TerrainClass, DisturbanceParams> disturbance) {
  // The stored traversability layer is informational; recomputing it from the
  // float32 elevation reproduces the generator's layer bit for bit.
  return TerrainWorld(map.elevation, map.types, trav, std::move(disturbance), map.obstacles);
}

}  // namespace terranav
