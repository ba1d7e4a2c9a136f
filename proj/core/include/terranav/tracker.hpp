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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "terranav/world.hpp"

namespace terranav {

struct MppiConfig {
  int rollouts = 5000;
  int horizon = 20;  // N-bar
  double dt = 0.1;
  double lambda = 1.0;
  double sigma_steer = 0.15;
  double sigma_accel = 0.8;
  std::array<double, 6> q{10.0, 10.0, 2.0, 1.0, 0.5, 0.5};  // (x, y, yaw, vx, vy, wz)
  std::array<double, 2> r{1.0, 0.1};                        // (steer, accel)
  double off_map_penalty = 1e6;  // per remaining step once a rollout leaves the map

  void validate() const;
};

// Time-indexed reference states on a uniform grid starting at t0.
class ReferencePath {
 public:
  ReferencePath() = default;
  ReferencePath(double t0, double dt, std::vector<VehicleState> states);

  // Linear interpolation (angle-wrapped for yaw); clamps outside the time span.
  VehicleState at(double t) const;

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  bool empty() const { return states_.empty(); }
  const std::vector<VehicleState>& states() const { return states_; }
  std::vector<Vec2> positions() const;

 private:
  double t0_ = 0.0;
  double dt_ = 0.1;
  std::vector<VehicleState> states_;
};

/// Quadratic tracking cost over N-bar stages plus the terminal state term.
/// traj and ref hold N-bar + 1 states, inputs N-bar entries.
double mppi_cost(std::span<const VehicleState> traj, std::span<const ControlInput> inputs,
                 std::span<const VehicleState> ref, const MppiConfig& cfg);

// exp(-(S_i - min S) / lambda), normalized to sum 1.
std::vector<double> mppi_weights(std::span<const double> costs, double lambda);

struct MppiResult {
  ControlInput command;
  std::vector<ControlInput> sequence;       // weighted average, unshifted
  std::vector<ControlInput> next_sequence;  // shifted warm start for the next call
  double min_cost = 0.0;
  double effective_samples = 0.0;  // 1 / sum w^2
};

/// One MPPI iteration with nominal dynamics and terrain attitude. Rollout r
/// perturbs the warm start with noise from derive_stream(seed, {r}); a warm
/// start of the wrong length is padded with its last entry (zeros if empty).
MppiResult mppi_step(const VehicleState& state, double t_now, const ReferencePath& ref, const TerrainWorld& world,
                     const VehicleParams& p, const MppiConfig& cfg, std::span<const ControlInput> warm_start,
                     std::uint64_t seed);

/// Geometric pure pursuit toward the point on `path` at `lookahead` distance
/// ahead of the closest point. Steering is clamped to the vehicle limit; the
/// acceleration is speed_gain * (v_ref - vx), clamped.
ControlInput pure_pursuit(const VehicleState& state, std::span<const Vec2> path, double lookahead, double v_ref,
                          const VehicleParams& p, double speed_gain = 1.0);

}  // namespace terranav
