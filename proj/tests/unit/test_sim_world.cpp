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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "terranav/error.hpp"
#include "terranav/sim_world.hpp"
#include "test_util.hpp"

namespace terranav {
namespace {

GpRegistry zero_registry() {
  GpRegistry reg;
  reg.set(TerrainClass::kGrass, zero_residual_model());
  reg.set(TerrainClass::kMud, zero_residual_model());
  return reg;
}

MissionConfig light_config() {
  MissionConfig cfg;
  cfg.planner.samples = 4;
  cfg.planner.horizon = 20;
  cfg.mppi.rollouts = 400;
  return cfg;
}

TEST(TrueStep, ZeroDisturbanceEqualsNominalStep) {
  const TerrainWorld world = testing::flat_world();
  const VehicleParams p;
  RandomStream rng(1);
  VehicleState s{10, 15, 0.3, 2.0, 0.1, 0.2};
  for (int k = 0; k < 50; ++k) {
    const ControlInput u{0.2 * std::sin(0.3 * k), 0.5};
    const VehicleState expect = step(s, u, world.attitude(s), p, 0.02);
    s = true_step(s, u, world, p, 0.02, rng);
    EXPECT_EQ(s.to_vector(), expect.to_vector());
  }
}

double lateral_gap_after(const TerrainWorld& world, int steps, std::uint64_t seed) {
  const VehicleParams p;
  RandomStream rng(seed);
  VehicleState truth{10, 15, 0, 2.0, 0, 0}, nominal = truth;
  const ControlInput u{0.25, 0.3};
  for (int k = 0; k < steps; ++k) {
    truth = true_step(truth, u, world, p, 0.02, rng);
    nominal = step(nominal, u, world.attitude(nominal), p, 0.02);
  }
  return (truth.position() - nominal.position()).norm();
}

TEST(TrueStep, MudTurnDeviatesFromNominal) {
  const TerrainWorld mud = testing::flat_world(80, 60, TerrainClass::kMud, DisturbanceParams::mud_default());
  const TerrainWorld grass = testing::flat_world(80, 60, TerrainClass::kGrass, DisturbanceParams::grass_default());
  const double early = lateral_gap_after(mud, 25, 3);
  const double late = lateral_gap_after(mud, 150, 3);
  EXPECT_GT(late, early);
  EXPECT_GT(late, 0.2);
  EXPECT_GT(late, 3 * lateral_gap_after(grass, 150, 3));
}

TEST(TrueStep, ReproducibleAndBoundaryChecked) {
  const TerrainWorld mud = testing::flat_world(80, 60, TerrainClass::kMud, DisturbanceParams::mud_default());
  EXPECT_EQ(lateral_gap_after(mud, 100, 9), lateral_gap_after(mud, 100, 9));
  RandomStream rng(1);
  try {
    true_step({-5, 15, 0, 1, 0, 0}, {}, mud, VehicleParams{}, 0.02, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundary);
  }
}

TEST(Collection, ZeroDisturbanceGivesZeroResiduals) {
  const TerrainWorld world = testing::flat_world();
  CollectionConfig cfg;
  cfg.duration = 60;
  const TrainingData d = collect_training_data(world, VehicleParams{}, cfg, 4);
  ASSERT_GT(d.total, 400u);
  for (const Vec3& y : d.by_class.at(TerrainClass::kGrass).outputs) EXPECT_LT(y.cwiseAbs().maxCoeff(), 1e-3);
}

double variance(const std::vector<Vec3>& ys, int dim) {
  double mean = 0;
  for (const auto& y : ys) mean += y[dim];
  mean /= ys.size();
  double v = 0;
  for (const auto& y : ys) v += (y[dim] - mean) * (y[dim] - mean);
  return v / (ys.size() - 1);
}

TEST(Collection, MudResidualVarianceExceedsGrass) {
  const TerrainWorld world =
      testing::split_world(20, DisturbanceParams::grass_default(), DisturbanceParams::mud_default());
  CollectionConfig cfg;
  cfg.duration = 520;
  const TrainingData d = collect_training_data(world, VehicleParams{}, cfg, 5);
  EXPECT_GE(d.total, 5000u);
  std::size_t sum = 0;
  for (const auto& [c, data] : d.by_class) sum += data.size();
  EXPECT_EQ(sum, d.total);
  const auto& grass = d.by_class.at(TerrainClass::kGrass).outputs;
  const auto& mud = d.by_class.at(TerrainClass::kMud).outputs;
  ASSERT_GT(grass.size(), 500u);
  ASSERT_GT(mud.size(), 500u);
  EXPECT_GT(variance(mud, 1), variance(grass, 1));
  const CollectionConfig again = cfg;
  EXPECT_EQ(collect_training_data(world, VehicleParams{}, again, 5).total, d.total);
}

TEST(Mission, ShortHopSucceedsForAllStacks) {
  const TerrainWorld world = testing::flat_world();
  MissionSpec m;
  m.start = {10, 15, 0, 0, 0, 0};
  m.goal = {12, 15};
  m.time_limit = 15;
  for (Stack s : {Stack::kProposed, Stack::kBaseline1, Stack::kBaseline2}) {
    const TrialLog log = run_mission(world, m, s, zero_registry(), VehicleParams{}, light_config(), 1);
    EXPECT_EQ(log.outcome, Outcome::kSuccess) << stack_name(s) << " " << log.reason;
    EXPECT_GT(log.path_length, 0.5);
    EXPECT_LT(log.duration, m.time_limit);
    EXPECT_NEAR(log.path_length, path_length(log.records), 1e-12);
  }
}

TEST(Mission, WallBlocksEveryStack) {
  std::vector<Obstacle> wall;
  for (double y = 0.0; y < 30.5; y += 0.4) wall.push_back({{20.0, y}, 0.6, 0.6});
  const TerrainWorld world = testing::flat_world(80, 60, TerrainClass::kGrass, DisturbanceParams::none(), wall);
  MissionSpec m;
  m.start = {15, 15, 0, 0, 0, 0};
  m.goal = {26, 15};
  m.time_limit = 8;
  for (Stack s : {Stack::kBaseline1, Stack::kBaseline2}) {
    const TrialLog log = run_mission(world, m, s, zero_registry(), VehicleParams{}, light_config(), 2);
    EXPECT_EQ(log.outcome, Outcome::kTimeout) << stack_name(s);
    EXPECT_EQ(log.reason, "unreachable") << stack_name(s);
  }
  const TrialLog log = run_mission(world, m, Stack::kProposed, zero_registry(), VehicleParams{}, light_config(), 2);
  EXPECT_FALSE(log.success()) << log.reason;
}

TEST(Mission, IdenticalInputsGiveIdenticalLogs) {
  const TerrainWorld world = generate_world(WorldGenConfig{}, 6);
  MissionSpec m;
  m.start = {3, 12, 0, 0, 0, 0};
  m.goal = {37, 12};
  m.time_limit = 3;
  for (Stack s : {Stack::kProposed, Stack::kBaseline2}) {
    const TrialLog a = run_mission(world, m, s, zero_registry(), VehicleParams{}, light_config(), 8);
    const TrialLog b = run_mission(world, m, s, zero_registry(), VehicleParams{}, light_config(), 8);
    EXPECT_EQ(trial_log_to_json(a), trial_log_to_json(b));
    EXPECT_EQ(trial_log_to_csv(a), trial_log_to_csv(b));
    EXPECT_EQ(a.outcome, Outcome::kTimeout);
    EXPECT_EQ(a.reason, "time_limit");
  }
}

TEST(TrialLogIo, JsonAndCsvLayout) {
  const TerrainWorld world = testing::flat_world();
  MissionSpec m;
  m.start = {10, 15, 0, 0, 0, 0};
  m.goal = {12, 15};
  m.time_limit = 10;
  const TrialLog log = run_mission(world, m, Stack::kBaseline1, zero_registry(), VehicleParams{}, light_config(), 1);
  const auto j = nlohmann::json::parse(trial_log_to_json(log));
  EXPECT_EQ(j["stack"], "baseline1");
  EXPECT_EQ(j["outcome"], "success");
  EXPECT_NEAR(j["path_length"].get<double>(), log.path_length, 1e-12);
  std::istringstream csv(trial_log_to_csv(log));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,x,y,yaw,vx,vy,wz,steer,accel,terrain");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, log.records.size());
}

TEST(TrialLogIo, PathLengthOfEmptyAndSingleRecord) {
  EXPECT_EQ(path_length({}), 0.0);
  EXPECT_EQ(path_length({TrialRecord{}}), 0.0);
  std::vector<TrialRecord> r(3);
  r[1].state.x = 3;
  r[1].state.y = 4;
  r[2].state.x = 3;
  EXPECT_NEAR(path_length(r), 9.0, 1e-15);
}

TEST(Names, RoundTrip) {
  for (Stack s : {Stack::kProposed, Stack::kBaseline1, Stack::kBaseline2}) EXPECT_EQ(stack_from_name(stack_name(s)), s);
  for (Outcome o : {Outcome::kSuccess, Outcome::kCollision, Outcome::kRollover, Outcome::kTimeout})
    EXPECT_EQ(outcome_from_name(outcome_name(o)), o);
  EXPECT_FALSE(stack_from_name("hybrid").has_value());
}

}  // namespace
}  // namespace terranav
