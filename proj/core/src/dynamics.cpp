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

#include "terranav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace terranav {

namespace {

// Longest RK4 sub-step; the v_x w_z coupling limits accuracy above ~2 m/s.
constexpr double kMaxSubstep = 0.015;

}  // namespace

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

double VehicleParams::footprint_radius() const {
  return 0.5 * std::hypot(wheelbase(), track_width);
}

void VehicleParams::validate() const {
  const bool ok = mass > 0 && izz > 0 && lf > 0 && lr > 0 && track_width > 0 && cg_height > 0 &&
                  roll_center_height > 0 && c_alpha_f > 0 && c_alpha_r > 0 && gravity > 0 &&
                  steer_max > 0 && accel_min <= 0 && accel_max >= 0 && v_min > 0 && v_max > 0;
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "vehicle parameters out of range");
}

SlipAngles slip_angles(const VehicleState& s, const ControlInput& u, const VehicleParams& p) {
  const double speed = std::max(s.vx, p.v_min);
  return {u.steer - (s.vy + p.lf * s.wz) / speed, (p.lr * s.wz - s.vy) / speed};
}

TerrainForces terrain_forces(const VehicleState& s, const ControlInput& u, const Attitude& att,
                             const VehicleParams& p) {
  const double cf = std::cos(att.roll), sf = std::sin(att.roll);
  const double ct = std::cos(att.pitch), st = std::sin(att.pitch);
  const double m = p.mass, g = p.gravity, h = p.cg_height;
  const double wheelbase = p.wheelbase();

  TerrainForces f;
  f.gravity_lateral = -m * g * ct * sf;
  f.load_front = (p.lr * m * g * ct * cf + h * m * u.accel + h * m * g * st) / wheelbase;
  f.load_rear = (p.lf * m * g * ct * cf - h * m * u.accel - h * m * g * st) / wheelbase;
  const SlipAngles alpha = slip_angles(s, u, p);
  f.lateral_front = p.c_alpha_f * f.load_front * alpha.front;
  f.lateral_rear = p.c_alpha_r * f.load_rear * alpha.rear;
  return f;
}

Vec6 state_derivative(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p) {
  const double ct = std::cos(att.pitch);
  if (!(ct > 0.0)) {
    throw Error(ErrorCode::kAttitudeSingularity, "state_derivative: cos(pitch) <= 0");
  }
  const double cf = std::cos(att.roll), sf = std::sin(att.roll);
  const double st = std::sin(att.pitch);
  const double cp = std::cos(s.yaw), sp = std::sin(s.yaw);
  const TerrainForces f = terrain_forces(s, u, att, p);

  Vec6 d;
  // World velocity is R^W_B (vx, vy, 0); only the first two columns contribute.
  d[0] = cp * ct * s.vx + (cp * st * sf - sp * cf) * s.vy;
  d[1] = sp * ct * s.vx + (sp * st * sf + cp * cf) * s.vy;
  d[2] = cf / ct * s.wz;
  d[3] = u.accel;
  d[4] = (f.lateral_front + f.lateral_rear - f.gravity_lateral) / p.mass - s.vx * s.wz;
  d[5] = (f.lateral_front * p.lf * std::cos(u.steer) - p.lr * f.lateral_rear) / p.izz;
  return d;
}

VehicleState rk4_step(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p, double dt) {
  const Vec6 x0 = s.to_vector();
  auto f = [&](const Vec6& x) { return state_derivative(VehicleState::from_vector(x), u, att, p); };
  const Vec6 k1 = f(x0);
  const Vec6 k2 = f(x0 + 0.5 * dt * k1);
  const Vec6 k3 = f(x0 + 0.5 * dt * k2);
  const Vec6 k4 = f(x0 + dt * k3);
  return VehicleState::from_vector(x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

int substep_count(const VehicleState& s, const VehicleParams& p, double dt) {
  const double speed = std::max(s.vx, p.v_min);
  const double wheelbase = p.wheelbase();
  const double stiff_f = p.c_alpha_f * p.lr * p.mass * p.gravity / wheelbase;
  const double stiff_r = p.c_alpha_r * p.lf * p.mass * p.gravity / wheelbase;
  const double lateral = (stiff_f + stiff_r) / (p.mass * speed);
  const double yaw = (stiff_f * p.lf * p.lf + stiff_r * p.lr * p.lr) / (p.izz * speed);
  const double rate = std::max({lateral, yaw, 1.0 / kMaxSubstep});
  return std::max(1, static_cast<int>(std::ceil(dt * rate - 1e-12)));
}

VehicleState step(const VehicleState& s, const ControlInput& u, const Attitude& att,
                  const VehicleParams& p, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step: dt must be positive");
  const int n = substep_count(s, p, dt);
  const double h = dt / n;
  VehicleState x = s;
  for (int i = 0; i < n; ++i) x = rk4_step(x, u, att, p, h);
  x.vx = std::max(x.vx, 0.0);
  return x;
}

double lateral_acceleration(const VehicleState& s, const ControlInput& u, const Attitude& att,
                            const VehicleParams& p) {
  // Companion formula of the rollover index with the effective cornering
  // stiffness C_alpha * F_z of the load-normalized tire model.
  const TerrainForces f = terrain_forces(s, u, att, p);
  const SlipAngles alpha = slip_angles(s, u, p);
  return (p.c_alpha_f * f.load_front * alpha.front + p.c_alpha_r * f.load_rear * alpha.rear) / p.mass;
}

double rollover_index(const VehicleState& s, const ControlInput& u, const Attitude& att,
                      const VehicleParams& p) {
  const TerrainForces f = terrain_forces(s, u, att, p);
  const double total_load = f.load_front + f.load_rear;
  if (!(total_load > 0.0)) {
    throw Error(ErrorCode::kDegenerateLoad, "rollover_index: non-positive vertical load");
  }
  const double ay = lateral_acceleration(s, u, att, p);
  const double angle = p.rollover_gravity_angle == RolloverGravityAngle::kYaw ? s.yaw : att.roll;
  const double hr = p.roll_center_height;
  return 2.0 * ((p.mass * ay + f.gravity_lateral) * hr - p.mass * p.gravity * hr * std::sin(angle)) /
         (p.track_width * total_load);
}

ControlInput clamp_input(const ControlInput& u, const VehicleParams& p) {
  return {std::clamp(u.steer, -p.steer_max, p.steer_max), std::clamp(u.accel, p.accel_min, p.accel_max)};
}

ControlInput governed_input(const VehicleState& s, const ControlInput& u, const VehicleParams& p) {
  ControlInput out = clamp_input(u, p);
  if (s.vx >= p.v_max && out.accel > 0.0) out.accel = 0.0;
  if (s.vx <= 0.0 && out.accel < 0.0) out.accel = 0.0;
  return out;
}

}  // namespace terranav
