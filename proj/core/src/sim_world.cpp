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

#include "terranav/sim_world.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "terranav/error.hpp"

namespace terranav {

VehicleState true_step(const VehicleState& s, const ControlInput& u, const TerrainWorld& world,
                       const VehicleParams& p, double dt, RandomStream& rng) {
  if (!world.supports(s.position())) throw Error(ErrorCode::kBoundary, "true_step: vehicle left the map");
  const Attitude att = world.attitude(s);
  const DisturbanceParams& d = world.disturbance(world.terrain_at(s.position()));
  VehicleState next = step(s, u, att, p, dt);

  const bool disturbed = d.k_vy != 0.0 || d.k_vx != 1.0 || d.k_w != 0.0;
  if (disturbed) {
    const TerrainForces f = terrain_forces(s, u, att, p);
    const Vec6 rate = state_derivative(s, u, att, p);
    next.vy += d.k_vy * (f.lateral_front + f.lateral_rear - f.gravity_lateral) / p.mass * dt;
    next.vx += (d.k_vx - 1.0) * u.accel * dt;
    next.wz += d.k_w * rate[5] * dt;
  }
  const double sq = std::sqrt(dt);
  if (d.noise_vx > 0.0) next.vx += d.noise_vx * sq * standard_normal(rng);
  if (d.noise_vy > 0.0) next.vy += d.noise_vy * sq * standard_normal(rng);
  if (d.noise_w > 0.0) next.wz += d.noise_w * sq * standard_normal(rng);
  next.vx = std::max(next.vx, 0.0);
  return next;
}

namespace {

bool inside_margin(const TerrainWorld& world, const Vec2& pos, double margin) {
  const GridGeometry& g = world.geometry();
  const double half = 0.5 * g.resolution;
  const Vec2 lo = g.origin - Vec2(half, half);
  const Vec2 hi = g.origin + Vec2(g.width * g.resolution - half, g.height * g.resolution - half);
  return pos.x() >= lo.x() + margin && pos.y() >= lo.y() + margin && pos.x() <= hi.x() - margin &&
         pos.y() <= hi.y() - margin && world.supports(pos);
}

VehicleState random_pose(const TerrainWorld& world, const VehicleParams& p, double margin, RandomStream& rng) {
  const GridGeometry& g = world.geometry();
  const double half = 0.5 * g.resolution;
  std::uniform_real_distribution<double> ux(g.origin.x() - half + margin,
                                            g.origin.x() + g.width * g.resolution - half - margin);
  std::uniform_real_distribution<double> uy(g.origin.y() - half + margin,
                                            g.origin.y() + g.height * g.resolution - half - margin);
  std::uniform_real_distribution<double> uyaw(-M_PI, M_PI);
  std::uniform_real_distribution<double> uv(0.0, p.v_max);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    VehicleState s{ux(rng), uy(rng), uyaw(rng), uv(rng), 0.0, 0.0};
    if (inside_margin(world, s.position(), margin) && !world.collides(s.position(), 2.0 * p.footprint_radius()))
      return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "collect_training_data: no free spawn pose");
}

}  // namespace

TrainingData collect_training_data(const TerrainWorld& world, const VehicleParams& p, const CollectionConfig& cfg,
                                   std::uint64_t seed) {
  if (!(cfg.sim_dt > 0.0) || !(cfg.log_dt >= cfg.sim_dt) || !(cfg.duration > 0.0) || !(cfg.time_constant > 0.0))
    throw Error(ErrorCode::kConfig, "collection: invalid timing parameters");
  const int substeps = static_cast<int>(std::lround(cfg.log_dt / cfg.sim_dt));
  const double sim_dt = cfg.log_dt / substeps;
  const auto ticks = static_cast<long>(std::floor(cfg.duration / cfg.log_dt));
  const double alpha = std::min(1.0, cfg.log_dt / cfg.time_constant);

  RandomStream policy_rng = derive_stream(seed, {0});
  RandomStream noise_rng = derive_stream(seed, {1});
  std::uniform_real_distribution<double> steer_dist(-p.steer_max, p.steer_max);
  std::uniform_real_distribution<double> accel_dist(p.accel_min, p.accel_max);

  TrainingData out;
  for (TerrainClass c : world.classes_present()) out.by_class[c];
  std::vector<LogEntry> segment;

  auto flush = [&]() {
    if (segment.size() >= 2) {
      GpDataset labeled = residual_labels(segment, p);
      for (std::size_t k = 0; k < labeled.size(); ++k) {
        const TerrainClass c = world.terrain_at(segment[k].state.position());
        out.by_class[c].append(labeled.inputs[k], labeled.outputs[k]);
        ++out.total;
      }
    }
    segment.clear();
  };

  VehicleState s = random_pose(world, p, cfg.edge_margin, policy_rng);
  ControlInput cmd{};
  double t = 0.0;
  for (long tick = 0; tick < ticks; ++tick) {
    cmd.steer += alpha * (steer_dist(policy_rng) - cmd.steer);
    cmd.accel += alpha * (accel_dist(policy_rng) - cmd.accel);
    const ControlInput applied = governed_input(s, cmd, p);
    segment.push_back({t, s, applied, world.attitude(s)});

    bool fault = false;
    try {
      for (int i = 0; i < substeps && !fault; ++i) {
        s = true_step(s, applied, world, p, sim_dt, noise_rng);
        fault = !inside_margin(world, s.position(), cfg.edge_margin) ||
                world.collides(s.position(), p.footprint_radius());
      }
    } catch (const Error&) {
      fault = true;
    }
    t += cfg.log_dt;
    if (fault) {
      // The faulted transition is dropped: the last logged entry has no successor.
      flush();
      s = random_pose(world, p, cfg.edge_margin, policy_rng);
      cmd = {};
      ++out.respawns;
    }
  }
  segment.push_back({t, s, governed_input(s, cmd, p), world.attitude(s)});
  flush();
  return out;
}

std::string_view stack_name(Stack s) {
  switch (s) {
    case Stack::kProposed: return "proposed";
    case Stack::kBaseline1: return "baseline1";
    case Stack::kBaseline2: return "baseline2";
  }
  return "unknown";
}

std::optional<Stack> stack_from_name(std::string_view name) {
  for (Stack s : {Stack::kProposed, Stack::kBaseline1, Stack::kBaseline2})
    if (stack_name(s) == name) return s;
  return std::nullopt;
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSuccess: return "success";
    case Outcome::kCollision: return "collision";
    case Outcome::kRollover: return "rollover";
    case Outcome::kTimeout: return "timeout";
  }
  return "unknown";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
  for (Outcome o : {Outcome::kSuccess, Outcome::kCollision, Outcome::kRollover, Outcome::kTimeout})
    if (outcome_name(o) == name) return o;
  return std::nullopt;
}

void MissionSpec::validate() const {
  if (!(goal_radius > 0.0)) throw Error(ErrorCode::kConfig, "mission: goal radius must be positive");
  if (!(time_limit > 0.0)) throw Error(ErrorCode::kConfig, "mission: time limit must be positive");
}

void MissionConfig::validate() const {
  if (!(sim_dt > 0.0) || !(control_period >= sim_dt) || !(plan_period >= sim_dt))
    throw Error(ErrorCode::kConfig, "mission: periods must be positive and no shorter than sim_dt");
  planner.validate();
  mppi.validate();
  if (!(baseline.lookahead > 0.0)) throw Error(ErrorCode::kConfig, "baseline: lookahead must be positive");
}

double path_length(const std::vector<TrialRecord>& records) {
  double len = 0.0;
  for (std::size_t k = 1; k < records.size(); ++k)
    len += (records[k].state.position() - records[k - 1].state.position()).norm();
  return len;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Blocking layer: T_geo thresholded, then dilated by `radius`.
GridMap2D blocking_layer(const GridMap2D& cost, double untraversable, double radius) {
  const GridGeometry& g = cost.geometry();
  GridMap2D out(g, 0.0);
  const int reach = static_cast<int>(std::ceil(radius / g.resolution));
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (cost(c, r) < untraversable) continue;
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          Cell n{c + dc, r + dr};
          if (!g.in_bounds(n)) continue;
          if (std::hypot(dc, dr) * g.resolution > radius + 1e-9) continue;
          out[n] = 1.0;
        }
      }
    }
  }
  return out;
}

}  // namespace

TrialLog run_mission(const TerrainWorld& world, const MissionSpec& mission, Stack stack, const GpRegistry& registry,
                     const VehicleParams& p, const MissionConfig& cfg, std::uint64_t seed) {
  mission.validate();
  cfg.validate();
  p.validate();

  TrialLog log;
  log.stack = stack;
  log.seed = seed;

  const int control_every = std::max(1, static_cast<int>(std::lround(cfg.control_period / cfg.sim_dt)));
  const auto max_steps = static_cast<long>(std::ceil(mission.time_limit / cfg.sim_dt - 1e-9));
  const double footprint = p.footprint_radius();
  RandomStream sim_rng = derive_stream(seed, {0});

  // Baseline maps.
  const GridGeometry& geo = world.geometry();
  GridMap2D edge_cost = world.traversability();
  if (stack == Stack::kBaseline2)
    edge_cost = hybrid_cost_map(world.traversability(), world.types(), {{TerrainClass::kMud, cfg.baseline.mud_penalty}});
  const double inflation = cfg.baseline.inflation < 0.0 ? footprint : cfg.baseline.inflation;
  GridMap2D blocking = stack == Stack::kProposed ? GridMap2D()
                                                 : blocking_layer(world.traversability(), cfg.baseline.untraversable,
                                                                  inflation);
  const std::optional<Cell> goal_cell = geo.find_cell(mission.goal);

  VehicleState s = mission.start;
  ControlInput command{};
  ReferencePath reference;
  std::vector<ControlInput> warm;
  std::vector<Vec2> global_path;
  double next_plan = 0.0;
  long plan_index = 0;
  long control_index = 0;
  bool unreachable = false;

  auto finish = [&](Outcome o, std::string reason, double t) {
    log.outcome = o;
    log.reason = std::move(reason);
    log.duration = t;
    if (o != Outcome::kSuccess) {
      log.failure_position = s.position();
      if (auto c = world.types().value_at(s.position())) log.failure_terrain = *c;
    }
    log.records.push_back({t, s, ControlInput{}, world.types().value_at(s.position()).value_or(TerrainClass::kGrass)});
    log.path_length = path_length(log.records);
    return log;
  };

  for (long stepi = 0; stepi < max_steps; ++stepi) {
    const double t = stepi * cfg.sim_dt;
    if ((s.position() - mission.goal).norm() <= mission.goal_radius) return finish(Outcome::kSuccess, "goal", t);
    if (!world.supports(s.position())) return finish(Outcome::kTimeout, "left_map", t);

    if (stepi % control_every == 0) {
      const bool replan = t + 1e-9 >= next_plan;
      if (replan) next_plan += cfg.plan_period;
      if (stack == Stack::kProposed) {
        if (replan) {
          const auto t0 = Clock::now();
          PlanResult plan = plan_local_path(s, mission.goal, world, registry, cfg.planner, p,
                                            splitmix64(seed ^ splitmix64(0x706c616eULL + plan_index)));
          log.plan_ms.push_back(elapsed_ms(t0));
          PlanRecord rec{t, plan.selected, plan.fallback, static_cast<int>(plan.safe_set.size()), 0.0};
          if (plan.fallback) {
            VehicleState hold = s;
            hold.vx = hold.vy = hold.wz = 0.0;
            reference = ReferencePath(t, cfg.planner.dt, {hold});
          } else {
            rec.cost = plan.candidates[plan.selected].cost;
            reference = ReferencePath(t, cfg.planner.dt, plan.path.states);
          }
          log.plans.push_back(rec);
          ++plan_index;
        }
        const auto t0 = Clock::now();
        MppiResult r = mppi_step(s, t, reference, world, p, cfg.mppi, warm,
                                 splitmix64(seed ^ splitmix64(0x6d707069ULL + control_index)));
        log.track_ms.push_back(elapsed_ms(t0));
        command = r.command;
        warm = std::move(r.next_sequence);
      } else {
        if (replan) {
          const auto t0 = Clock::now();
          PlanRecord rec{t, 0, false, 0, 0.0};
          try {
            if (!goal_cell) throw Error(ErrorCode::kUnreachable, "goal outside map");
            const Cell start = geo.cell_at(s.position());
            std::vector<Cell> cells = astar_plan(edge_cost, blocking, start, *goal_cell, 0.5, cfg.baseline.astar);
            global_path.clear();
            global_path.push_back(s.position());
            for (std::size_t k = 1; k < cells.size(); ++k) global_path.push_back(geo.cell_center(cells[k]));
            global_path.back() = mission.goal;
            rec.selected = static_cast<int>(cells.size());
            rec.cost = path_cost(edge_cost, cells, cfg.baseline.astar);
            unreachable = false;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kUnreachable) throw;
            rec.fallback = true;
            unreachable = global_path.empty();
          }
          log.plan_ms.push_back(elapsed_ms(t0));
          log.plans.push_back(rec);
          ++plan_index;
        }
        const auto t0 = Clock::now();
        if (global_path.empty()) {
          command = clamp_input({0.0, -cfg.baseline.speed_gain * s.vx}, p);
        } else {
          command = pure_pursuit(s, global_path, cfg.baseline.lookahead, cfg.baseline.speed, p,
                                 cfg.baseline.speed_gain);
        }
        log.track_ms.push_back(elapsed_ms(t0));
      }
      ++control_index;
    }

    const ControlInput applied = governed_input(s, command, p);
    const TerrainClass here = world.terrain_at(s.position());
    log.records.push_back({t, s, applied, here});

    const double t_next = (stepi + 1) * cfg.sim_dt;
    try {
      s = true_step(s, applied, world, p, cfg.sim_dt, sim_rng);
      if (!world.supports(s.position())) return finish(Outcome::kTimeout, "left_map", t_next);
      if (rollover_index(s, applied, world.attitude(s), p) > 1.0) return finish(Outcome::kRollover, "rollover", t_next);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBoundary) return finish(Outcome::kTimeout, "left_map", t_next);
      return finish(Outcome::kRollover, std::string("fault:") + std::string(to_string(e.code())), t_next);
    }
    if (world.collides(s.position(), footprint)) return finish(Outcome::kCollision, "collision", t_next);
  }
  const double t_end = max_steps * cfg.sim_dt;
  if ((s.position() - mission.goal).norm() <= mission.goal_radius) return finish(Outcome::kSuccess, "goal", t_end);
  return finish(Outcome::kTimeout, unreachable ? "unreachable" : "time_limit", t_end);
}

std::string trial_log_to_json(const TrialLog& log) {
  nlohmann::ordered_json j;
  j["format"] = "terranav.trial";
  j["version"] = 1;
  j["stack"] = stack_name(log.stack);
  j["seed"] = log.seed;
  j["outcome"] = outcome_name(log.outcome);
  j["reason"] = log.reason;
  j["duration"] = log.duration;
  j["path_length"] = log.path_length;
  if (log.failure_position) {
    j["failure_position"] = {log.failure_position->x(), log.failure_position->y()};
  } else {
    j["failure_position"] = nullptr;
  }
  if (log.failure_terrain) {
    j["failure_terrain"] = terrain_name(*log.failure_terrain);
  } else {
    j["failure_terrain"] = nullptr;
  }
  j["records"] = log.records.size();
  auto plans = nlohmann::ordered_json::array();
  for (const PlanRecord& r : log.plans) {
    plans.push_back({{"t", r.t}, {"selected", r.selected}, {"fallback", r.fallback}, {"safe", r.safe_count},
                     {"cost", std::isfinite(r.cost) ? nlohmann::ordered_json(r.cost) : nlohmann::ordered_json()}});
  }
  j["plans"] = std::move(plans);
  return j.dump(2) + "\n";
}

std::string trial_log_to_csv(const TrialLog& log) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,x,y,yaw,vx,vy,wz,steer,accel,terrain\n";
  for (const TrialRecord& r : log.records) {
    os << r.t << ',' << r.state.x << ',' << r.state.y << ',' << r.state.yaw << ',' << r.state.vx << ','
       << r.state.vy << ',' << r.state.wz << ',' << r.command.steer << ',' << r.command.accel << ','
       << terrain_name(r.terrain) << '\n';
  }
  return os.str();
}

}  // namespace terranav
