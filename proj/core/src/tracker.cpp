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

#include "terranav/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terranav/error.hpp"
#include "terranav/parallel.hpp"
#include "terranav/random.hpp"

namespace terranav {

void MppiConfig::validate() const {
  if (rollouts < 1 || horizon < 1) throw Error(ErrorCode::kConfig, "mppi: rollouts and horizon must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::kConfig, "mppi: dt must be positive");
  if (!(lambda > 0.0)) throw Error(ErrorCode::kConfig, "mppi: lambda must be positive");
  if (!(sigma_steer >= 0.0) || !(sigma_accel >= 0.0))
    throw Error(ErrorCode::kConfig, "mppi: noise sigma must be non-negative");
  for (double v : q)
    if (!(v >= 0.0)) throw Error(ErrorCode::kConfig, "mppi: Q must be non-negative");
  for (double v : r)
    if (!(v >= 0.0)) throw Error(ErrorCode::kConfig, "mppi: R must be non-negative");
}

ReferencePath::ReferencePath(double t0, double dt, std::vector<VehicleState> states)
    : t0_(t0), dt_(dt), states_(std::move(states)) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reference path: dt must be positive");
}

VehicleState ReferencePath::at(double t) const {
  if (states_.empty()) throw Error(ErrorCode::kInvalidArgument, "reference path is empty");
  double s = (t - t0_) / dt_;
  if (s <= 0.0) return states_.front();
  auto last = static_cast<double>(states_.size() - 1);
  if (s >= last) return states_.back();
  auto k = static_cast<std::size_t>(std::floor(s));
  double a = s - static_cast<double>(k);
  const VehicleState& p = states_[k];
  const VehicleState& q = states_[k + 1];
  auto lerp = [a](double u, double v) { return u + a * (v - u); };
  return {lerp(p.x, q.x),   lerp(p.y, q.y),   wrap_angle(p.yaw + a * wrap_angle(q.yaw - p.yaw)),
          lerp(p.vx, q.vx), lerp(p.vy, q.vy), lerp(p.wz, q.wz)};
}

std::vector<Vec2> ReferencePath::positions() const {
  std::vector<Vec2> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.position());
  return out;
}

namespace {

double stage_state_cost(const VehicleState& s, const VehicleState& r, const MppiConfig& cfg) {
  double e[6] = {s.x - r.x, s.y - r.y, wrap_angle(s.yaw - r.yaw), s.vx - r.vx, s.vy - r.vy, s.wz - r.wz};
  double c = 0.0;
  for (int i = 0; i < 6; ++i) c += cfg.q[i] * e[i] * e[i];
  return c;
}

double stage_input_cost(const ControlInput& u, const MppiConfig& cfg) {
  return cfg.r[0] * u.steer * u.steer + cfg.r[1] * u.accel * u.accel;
}

}  // namespace

double mppi_cost(std::span<const VehicleState> traj, std::span<const ControlInput> inputs,
                 std::span<const VehicleState> ref, const MppiConfig& cfg) {
  if (traj.size() != inputs.size() + 1 || ref.size() != traj.size())
    throw Error(ErrorCode::kInvalidArgument, "mppi_cost: need N+1 states, N inputs and N+1 reference states");
  double c = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    c += stage_state_cost(traj[k], ref[k], cfg) + stage_input_cost(inputs[k], cfg);
  return c + stage_state_cost(traj.back(), ref.back(), cfg);
}

std::vector<double> mppi_weights(std::span<const double> costs, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mppi_weights: lambda must be positive");
  std::vector<double> w(costs.size(), 0.0);
  if (costs.empty()) return w;
  double best = *std::min_element(costs.begin(), costs.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    w[i] = std::isfinite(costs[i]) ? std::exp(-(costs[i] - best) / lambda) : 0.0;
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

MppiResult mppi_step(const VehicleState& state, double t_now, const ReferencePath& ref, const TerrainWorld& world,
                     const VehicleParams& p, const MppiConfig& cfg, std::span<const ControlInput> warm_start,
                     std::uint64_t seed) {
  cfg.validate();
  const int n = cfg.horizon;
  const int count = cfg.rollouts;

  std::vector<ControlInput> base(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (warm_start.empty()) break;
    base[k] = warm_start[std::min<std::size_t>(k, warm_start.size() - 1)];
  }

  std::vector<VehicleState> reference(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) reference[k] = ref.at(t_now + k * cfg.dt);

  std::vector<ControlInput> perturbed(static_cast<std::size_t>(count) * n);
  std::vector<double> costs(static_cast<std::size_t>(count));

  parallel_for(static_cast<std::size_t>(count), [&](std::size_t r) {
    RandomStream rng = derive_stream(seed, {r});
    ControlInput* v = &perturbed[r * n];
    for (int k = 0; k < n; ++k) {
      ControlInput u{base[k].steer + cfg.sigma_steer * standard_normal(rng),
                     base[k].accel + cfg.sigma_accel * standard_normal(rng)};
      v[k] = clamp_input(u, p);
    }
    VehicleState s = state;
    double c = 0.0;
    for (int k = 0; k < n; ++k) {
      c += stage_state_cost(s, reference[k], cfg) + stage_input_cost(v[k], cfg);
      if (!world.supports(s.position())) {
        c += cfg.off_map_penalty * (n - k);
        costs[r] = c;
        return;
      }
      try {
        s = step(s, governed_input(s, v[k], p), world.attitude(s), p, cfg.dt);
      } catch (const Error&) {
        c += cfg.off_map_penalty * (n - k);
        costs[r] = c;
        return;
      }
    }
    costs[r] = c + stage_state_cost(s, reference[n], cfg);
  });

  std::vector<double> w = mppi_weights(costs, cfg.lambda);
  MppiResult out;
  out.sequence.assign(static_cast<std::size_t>(n), ControlInput{});
  double sq = 0.0;
  for (int r = 0; r < count; ++r) {
    sq += w[r] * w[r];
    if (w[r] == 0.0) continue;
    for (int k = 0; k < n; ++k) {
      out.sequence[k].steer += w[r] * perturbed[static_cast<std::size_t>(r) * n + k].steer;
      out.sequence[k].accel += w[r] * perturbed[static_cast<std::size_t>(r) * n + k].accel;
    }
  }
  for (auto& u : out.sequence) u = clamp_input(u, p);  // guards rounding at the bounds
  out.command = out.sequence.front();
  out.next_sequence.assign(out.sequence.begin() + 1, out.sequence.end());
  out.next_sequence.push_back(out.sequence.back());
  out.min_cost = *std::min_element(costs.begin(), costs.end());
  out.effective_samples = sq > 0.0 ? 1.0 / sq : 0.0;
  return out;
}

ControlInput pure_pursuit(const VehicleState& state, std::span<const Vec2> path, double lookahead, double v_ref,
                          const VehicleParams& p, double speed_gain) {
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "pure_pursuit: empty path");
  if (!(lookahead > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pure_pursuit: lookahead must be positive");
  const Vec2 pos = state.position();

  // Closest point, as segment index plus fraction.
  std::size_t seg = 0;
  double frac = 0.0;
  double best = (path[0] - pos).squaredNorm();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Vec2 d = path[i + 1] - path[i];
    double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((pos - path[i]).dot(d) / len2, 0.0, 1.0) : 0.0;
    double dist = (path[i] + t * d - pos).squaredNorm();
    if (dist < best) {
      best = dist;
      seg = i;
      frac = t;
    }
  }

  // First point beyond the closest point at distance >= lookahead from the vehicle.
  Vec2 target = path.back();
  for (std::size_t i = seg; i + 1 < path.size(); ++i) {
    Vec2 a = i == seg ? Vec2(path[i] + frac * (path[i + 1] - path[i])) : path[i];
    Vec2 b = path[i + 1];
    if ((b - pos).norm() < lookahead) continue;
    // Solve |a + t (b - a) - pos| = lookahead for the largest t in [0, 1].
    Vec2 d = b - a;
    Vec2 f = a - pos;
    double qa = d.squaredNorm();
    double qb = 2.0 * f.dot(d);
    double qc = f.squaredNorm() - lookahead * lookahead;
    double disc = qb * qb - 4.0 * qa * qc;
    double t = 1.0;
    if (qa > 0.0 && disc >= 0.0) t = std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0);
    target = a + t * d;
    break;
  }

  Vec2 rel = target - pos;
  double c = std::cos(state.yaw), s = std::sin(state.yaw);
  double bx = c * rel.x() + s * rel.y();
  double by = -s * rel.x() + c * rel.y();
  double ld = std::hypot(bx, by);
  double steer = 0.0;
  if (ld > 1e-9) {
    double alpha = std::atan2(by, bx);
    if (std::abs(alpha) >= 0.5 * M_PI)
      steer = std::copysign(p.steer_max, alpha);
    else
      steer = std::atan(2.0 * p.wheelbase() * std::sin(alpha) / ld);
  }
  return clamp_input({steer, speed_gain * (v_ref - state.vx)}, p);
}

}  // namespace terranav
