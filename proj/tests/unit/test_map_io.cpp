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

#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "terranav/error.hpp"
#include "terranav/map_io.hpp"

namespace terranav {
namespace {

WorldGenConfig small_scenario() {
  WorldGenConfig cfg;
  cfg.obstacle_count = 4;
  return cfg;
}

TEST(MapIo, EncodeDecodeRoundTrip) {
  const TerrainWorld world = generate_world(small_scenario(), 5);
  const MapFile a = to_map_file(world);
  const MapFile b = decode_map(encode_map(a));
  ASSERT_EQ(b.elevation.geometry().width, a.elevation.geometry().width);
  ASSERT_EQ(b.elevation.geometry().height, a.elevation.geometry().height);
  EXPECT_EQ(b.elevation.geometry().resolution, a.elevation.geometry().resolution);
  EXPECT_EQ(b.elevation.values(), a.elevation.values());
  for (std::size_t i = 0; i < a.traversability.values().size(); ++i)
    EXPECT_EQ(b.traversability.values()[i], static_cast<double>(static_cast<float>(a.traversability.values()[i])));
  EXPECT_EQ(b.types.values(), a.types.values());
  ASSERT_EQ(b.obstacles.size(), a.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_EQ(b.obstacles[i].center, a.obstacles[i].center);
    EXPECT_EQ(b.obstacles[i].radius, a.obstacles[i].radius);
  }
  EXPECT_EQ(encode_map(b), encode_map(a));
}

TEST(MapIo, HeaderDescribesLayers) {
  const std::string bytes = encode_map(to_map_file(generate_world(small_scenario(), 5)));
  const auto nl = bytes.find('\n');
  ASSERT_NE(nl, std::string::npos);
  const auto h = nlohmann::json::parse(bytes.substr(0, nl));
  const int w = h["width"], ht = h["height"];
  std::size_t payload = 0;
  for (const auto& layer : h["layers"]) {
    const std::size_t per = layer["dtype"] == "uint8" ? 1 : 4;
    EXPECT_EQ(layer["bytes"].get<std::size_t>(), per * w * ht) << layer["name"];
    EXPECT_EQ(layer["offset"].get<std::size_t>(), payload);
    payload += layer["bytes"].get<std::size_t>();
  }
  EXPECT_EQ(bytes.size(), nl + 1 + payload);
}

TEST(MapIo, ReloadedWorldMatchesGenerated) {
  const WorldGenConfig cfg = small_scenario();
  const TerrainWorld world = generate_world(cfg, 8);
  const TerrainWorld back = world_from_map(decode_map(encode_map(to_map_file(world))), cfg.traversability,
                                           cfg.disturbance);
  EXPECT_EQ(back.elevation().values(), world.elevation().values());
  EXPECT_EQ(back.traversability().values(), world.traversability().values());
}

TEST(MapIo, CorruptInputRejected) {
  const std::string bytes = encode_map(to_map_file(generate_world(small_scenario(), 5)));
  for (const std::string& bad : {std::string(), std::string("{}\n"), bytes.substr(0, bytes.size() - 3),
                                 std::string("not json\n") + bytes}) {
    try {
      decode_map(bad);
      ADD_FAILURE() << "accepted " << bad.size() << " bytes";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
  }
}

TEST(MapIo, UnreadableAndUnwritablePaths) {
  const MapFile m = to_map_file(generate_world(small_scenario(), 5));
  const auto dir = std::filesystem::temp_directory_path() / "terranav_map_io_missing" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  EXPECT_THROW(read_map((dir / "x.tnm").string()), Error);
  std::filesystem::create_directories(dir);
  EXPECT_THROW(write_map(dir.string(), m), Error);
  write_map((dir / "x.tnm").string(), m);
  EXPECT_EQ(encode_map(read_map((dir / "x.tnm").string())), encode_map(m));
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace terranav
