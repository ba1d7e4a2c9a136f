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

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "terranav/gp.hpp"
#include "terranav/world.hpp"

namespace terranav {

using Mat2 = Eigen::Matrix2d;

struct PlannerConfig {
  int steer_samples = 21;
  int accel_samples = 3;
  double accel_span = 1.0;  // accelerations spread over [-span, +span]
  int samples = 20;         // M predictive rollouts per candidate
  int horizon = 30;         // N steps
  double dt = 0.1;
  int kernel_size = 5;  // s, odd
  double rollover_threshold = 0.3;
  double w_gp = 1.0;
  double w_e = 0.05;
  double w_dist = 0.5;
  double cov_regularizer = 1e-6;  // m^2

  int candidate_count() const { return steer_samples * accel_samples; }
  void validate() const;
};

// States k = 0..N of one propagated path; shorter when it left the map.
struct Rollout {
  std::vector<VehicleState> states;
  std::vector<Attitude> attitudes;
  bool truncated = false;
};

struct PathCandidate {
  ControlInput input;
  Rollout nominal;
  std::vector<Rollout> samples;
  std::vector<Vec2> mean;       // k = 1..N
  std::vector<Mat2> covariance;  // k = 1..N
  std::vector<double> t_gp;     // k = 1..N
  std::vector<double> deviation;  // e(k), k = 1..N
  double cost = std::numeric_limits<double>::infinity();  // T_i
  double goal_distance = std::numeric_limits<double>::infinity();  // T_dist
  bool safe = false;

  bool truncated() const;
};

struct PlanResult {
  int selected = -1;
  bool fallback = false;
  ControlInput command;
  Rollout path;  // nominal rollout of the selected candidate
  std::vector<PathCandidate> candidates;
  std::vector<int> safe_set;
};

/// Constant-over-horizon inputs on a steering x acceleration grid, steering
/// outer. Steering spans [-steer_max, steer_max], acceleration
/// [-accel_span, accel_span]; a single grid point sits at 0.
std::vector<ControlInput> sample_inputs(const PlannerConfig& cfg, const VehicleParams& p);

/// Nominal propagation with terrain attitude re-derived at every state.
/// The rollout stops and is flagged truncated once a state leaves the region
/// where terrain attitude is defined.
Rollout rollout_nominal(const VehicleState& x0, const ControlInput& u, const TerrainWorld& world,
                        const PlannerConfig& cfg, const VehicleParams& p);

/// M GP-perturbed rollouts of one candidate. Each step applies the nominal
/// model, then adds a posterior sample of the velocity residual from the GP
/// of the terrain under that sample's own position. Sample m of candidate i
/// draws from derive_stream(seed, {i, m}).
std::vector<Rollout> rollout_predictive(const VehicleState& x0, const ControlInput& u, const TerrainWorld& world,
                                        const GpRegistry& registry, const PlannerConfig& cfg,
                                        const VehicleParams& p, std::uint64_t seed, int candidate_index);

struct PathMoments {
  std::vector<Vec2> mean;        // k = 1..N
  std::vector<Mat2> covariance;  // unbiased, plus eps I
};

// Throws kInsufficientSamples for fewer than two samples.
PathMoments distribution_moments(std::span<const Rollout> samples, double eps);

/// Normalized Gaussian kernel N(mean, cov) over the s x s cost submap,
/// contracted with the submap values.
double smoothed_traversability(const Vec2& mean, const Mat2& cov, const GridMap2D& cost, int s, double fill);

// sqrt(d^T cov^-1 d) with d = nominal - mean.
double mahalanobis_deviation(const Vec2& nominal, const Vec2& mean, const Mat2& cov);

// Sum over k of w_gp T_gp(k) + w_e e(k); infinite for truncated candidates.
double candidate_cost(const PathCandidate& cand, const PlannerConfig& cfg);

// Indices whose nominal and sampled states all keep the rollover index at or below the threshold.
std::vector<int> safe_set(std::span<const PathCandidate> candidates, const PlannerConfig& cfg,
                          const VehicleParams& p);

/// argmin over the safe set of T_i + w_dist T_dist, ties by |steer| then index.
/// With an empty safe set returns a full-brake, zero-steer fallback.
PlanResult select_best(std::vector<PathCandidate> candidates, const std::vector<int>& safe, const Vec2& goal,
                       const PlannerConfig& cfg, const VehicleParams& p);

// Full planning call: sample, propagate, score, filter, select.
// Compact JSON with the command, selected path, safe set and per-candidate
// diagnostics; non-finite costs are written as null.
std::string plan_result_to_json(const PlanResult& result);

PlanResult plan_local_path(const VehicleState& x0, const Vec2& goal, const TerrainWorld& world,
                           const GpRegistry& registry, const PlannerConfig& cfg, const VehicleParams& p,
                           std::uint64_t seed);

}  // namespace terranav
