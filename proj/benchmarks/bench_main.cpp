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

#include <benchmark/benchmark.h>

#include "terranav/gp.hpp"
#include "terranav/planner.hpp"
#include "terranav/random.hpp"
#include "terranav/sim_world.hpp"
#include "terranav/tracker.hpp"

namespace terranav {
namespace {

// Residual model over 300 random training points with fixed hyperparameters.
GpModel synthetic_model(double signal_var, std::uint64_t seed) {
  RandomStream rng(seed);
  const int n = 300;
  Eigen::MatrixXd x(n, kGpInputDim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < kGpInputDim; ++d) x(i, d) = standard_normal(rng);
  SeHyper h;
  h.log_signal_var = std::log(signal_var);
  h.log_length.fill(std::log(1.5));
  h.log_noise_var = std::log(0.1 * signal_var);
  std::array<ScalarGp, kGpOutputDim> outs;
  for (auto& o : outs) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sqrt(signal_var) * standard_normal(rng);
    o = ScalarGp(x, y, h);
  }
  return GpModel(outs);
}

struct Scene {
  TerrainWorld world = generate_world(WorldGenConfig{}, 3);
  GpRegistry registry;
  VehicleParams p;
  Scene() {
    registry.set(TerrainClass::kGrass, synthetic_model(1e-4, 1));
    registry.set(TerrainClass::kMud, synthetic_model(2e-2, 2));
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

void BM_PlanLocalPath(benchmark::State& state) {
  const Scene& s = scene();
  PlannerConfig cfg;
  cfg.samples = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_local_path({3, 12, 0, 2, 0, 0}, {37, 12}, s.world, s.registry, cfg, s.p, ++seed));
  }
}
BENCHMARK(BM_PlanLocalPath)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MppiStep(benchmark::State& state) {
  const Scene& s = scene();
  MppiConfig cfg;
  cfg.rollouts = static_cast<int>(state.range(0));
  std::vector<VehicleState> ref;
  for (int k = 0; k <= 60; ++k) ref.push_back({3.0 + 0.2 * k, 12.0, 0, 2.0, 0, 0});
  const ReferencePath path(0.0, 0.1, ref);
  std::vector<ControlInput> warm;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    MppiResult r = mppi_step({3, 12, 0, 2, 0, 0}, 0.0, path, s.world, s.p, cfg, warm, ++seed);
    benchmark::DoNotOptimize(r.command);
  }
}
BENCHMARK(BM_MppiStep)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_GpPredictBatch(benchmark::State& state) {
  const GpModel& m = scene().registry.at(TerrainClass::kMud);
  RandomStream rng(5);
  GpInputBatch q(state.range(0), kGpInputDim);
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (int d = 0; d < kGpInputDim; ++d) q(i, d) = standard_normal(rng);
  Eigen::MatrixX3d mean, var;
  for (auto _ : state) {
    m.predict(q, mean, var);
    benchmark::DoNotOptimize(mean.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GpPredictBatch)->Arg(1)->Arg(20)->Arg(1260);

void BM_DynamicsStep(benchmark::State& state) {
  const Scene& s = scene();
  VehicleState x{10, 10, 0.3, 2.0, 0.1, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(x, {0.1, 0.5}, s.world.attitude(x), s.p, 0.1));
  }
}
BENCHMARK(BM_DynamicsStep);

}  // namespace
}  // namespace terranav

BENCHMARK_MAIN();
