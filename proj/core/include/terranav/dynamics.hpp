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

#include <Eigen/Core>

#include "terranav/terrain.hpp"

namespace terranav {

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct VehicleState {
  double x = 0.0;    // world x, m
  double y = 0.0;    // world y, m
  double yaw = 0.0;  // rad
  double vx = 0.0;   // body longitudinal velocity, m/s
  double vy = 0.0;   // body lateral velocity, m/s
  double wz = 0.0;   // body yaw rate, rad/s

  Vec2 position() const { return {x, y}; }
  Vec6 to_vector() const {
    Vec6 v;
    v << x, y, yaw, vx, vy, wz;
    return v;
  }
  static VehicleState from_vector(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
};

struct ControlInput {
  double steer = 0.0;  // rad
  double accel = 0.0;  // m/s^2
};

// Which angle enters the gravity term of the rollover index.
enum class RolloverGravityAngle { kYaw, kRoll };

struct VehicleParams {
  double mass = 22.0;
  double izz = 1.2;
  double lf = 0.3;
  double lr = 0.3;
  double track_width = 0.44;
  double cg_height = 0.2;
  double roll_center_height = 0.12;  // c.g. above the roll center
  double c_alpha_f = 4.5;            // lateral force per unit load per rad
  double c_alpha_r = 4.5;
  double gravity = 9.81;
  double steer_max = 0.35;
  double accel_min = -3.0;
  double accel_max = 3.0;
  double v_min = 0.5;  // slip-angle guard speed
  double v_max = 3.0;  // speed governor ceiling
  RolloverGravityAngle rollover_gravity_angle = RolloverGravityAngle::kYaw;

  double wheelbase() const { return lf + lr; }
  // Radius of the disc that covers the vehicle footprint around the c.g.
  double footprint_radius() const;
  void validate() const;
};

struct TerrainForces {
  double gravity_lateral = 0.0;  // F_G
  double load_front = 0.0;       // F_zf
  double load_rear = 0.0;        // F_zr
  double lateral_front = 0.0;    // F_yf
  double lateral_rear = 0.0;     // F_yr
};

struct SlipAngles {
  double front = 0.0;
  double rear = 0.0;
};

SlipAngles slip_angles(const VehicleState& s, const ControlInput& u, const VehicleParams& p);

TerrainForces terrain_forces(const VehicleState& s, const ControlInput& u, const Attitude& att,
                             const VehicleParams& p);

// Time derivative of (x, y, yaw, vx, vy, wz). Throws kAttitudeSingularity for cos(pitch) <= 0.
Vec6 state_derivative(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p);

/// Advances the state by `dt` with classical RK4, attitude held fixed.
///
/// The interval is split into equal RK4 sub-steps no longer than the inverse
/// of the lateral/yaw stiffness estimate at the current speed; at low speed
/// the slip dynamics are stiff enough that a single 0.1 s step diverges. The
/// attitude's yaw entry is ignored (the state's own yaw is used).
VehicleState step(const VehicleState& s, const ControlInput& u, const Attitude& att,
                  const VehicleParams& p, double dt);

// Single RK4 step over dt without sub-division; exposed for convergence checks.
VehicleState rk4_step(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p, double dt);

// Number of RK4 sub-steps step() uses for this state and dt.
int substep_count(const VehicleState& s, const VehicleParams& p, double dt);

// Lateral acceleration entering the rollover index.
double lateral_acceleration(const VehicleState& s, const ControlInput& u, const Attitude& att,
                            const VehicleParams& p);

/// Normalized lateral load transfer, 2[(m a_y + F_G) h_R - m g h_R sin(a)] / (L_w (F_zf + F_zr))
/// with `a` the yaw or roll angle per p.rollover_gravity_angle.
/// Throws kDegenerateLoad when the total vertical load is not positive.
double rollover_index(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p);

// Clamps steering/acceleration to the vehicle's bounds.
ControlInput clamp_input(const ControlInput& u, const VehicleParams& p);

// Low-level speed governor: no throttle above v_max and no braking below standstill.
ControlInput governed_input(const VehicleState& s, const ControlInput& u, const VehicleParams& p);

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace terranav
