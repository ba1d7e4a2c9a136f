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

#include "terranav_cli/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include <toml.hpp>

#include "terranav/error.hpp"

namespace terranav::cli {
namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kConfig, "config key '" + key + "': " + what);
}

std::string_view gravity_angle_name(RolloverGravityAngle a) { return a == RolloverGravityAngle::kYaw ? "yaw" : "roll"; }

// --- value codecs -----------------------------------------------------------

template <typename T>
ojson encode(const T& v) {
  if constexpr (std::is_same_v<T, Vec2>) {
    return ojson::array({v.x(), v.y()});
  } else if constexpr (std::is_same_v<T, std::vector<Vec2>>) {
    ojson a = ojson::array();
    for (const Vec2& p : v) a.push_back(ojson::array({p.x(), p.y()}));
    return a;
  } else if constexpr (std::is_same_v<T, WorldPreset>) {
    return std::string(preset_name(v));
  } else if constexpr (std::is_same_v<T, RolloverGravityAngle>) {
    return std::string(gravity_angle_name(v));
  } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
    // TOML integers are signed; larger values travel as decimal strings.
    if (v > static_cast<T>(std::numeric_limits<std::int64_t>::max())) return std::to_string(v);
    return static_cast<std::int64_t>(v);
  } else {
    return v;
  }
}

double as_double(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad(key, "expected an integer");
  return j.get<std::int64_t>();
}

Vec2 as_vec2(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) bad(key, "expected [x, y]");
  return {as_double(j[0], key), as_double(j[1], key)};
}

template <typename T>
void decode(const json& j, T& v, const std::string& key) {
  if constexpr (std::is_same_v<T, double>) {
    v = as_double(j, key);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) bad(key, "expected a boolean");
    v = j.get<bool>();
  } else if constexpr (std::is_same_v<T, int>) {
    const std::int64_t i = as_int(j, key);
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) bad(key, "out of range");
    v = static_cast<int>(i);
  } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
    if (j.is_string()) {
      const std::string text = j.get<std::string>();
      std::uint64_t u = 0;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), u);
      if (ec != std::errc() || end != text.data() + text.size() || text.empty()) bad(key, "expected an unsigned integer");
      v = static_cast<T>(u);
      return;
    }
    const std::int64_t i = as_int(j, key);
    if (i < 0) bad(key, "must be non-negative");
    v = static_cast<T>(i);
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) bad(key, "expected a string");
    v = j.get<std::string>();
  } else if constexpr (std::is_same_v<T, Vec2>) {
    v = as_vec2(j, key);
  } else if constexpr (std::is_same_v<T, std::vector<Vec2>>) {
    if (!j.is_array()) bad(key, "expected an array of [x, y]");
    v.clear();
    for (const json& e : j) v.push_back(as_vec2(e, key));
  } else if constexpr (std::is_same_v<T, WorldPreset>) {
    if (!j.is_string()) bad(key, "expected a preset name");
    auto p = preset_from_name(j.get<std::string>());
    if (!p) bad(key, "unknown preset '" + j.get<std::string>() + "'");
    v = *p;
  } else if constexpr (std::is_same_v<T, RolloverGravityAngle>) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "yaw") {
      v = RolloverGravityAngle::kYaw;
    } else if (s == "roll") {
      v = RolloverGravityAngle::kRoll;
    } else {
      bad(key, "expected \"yaw\" or \"roll\"");
    }
  } else if constexpr (std::is_same_v<T, std::array<double, 6>> || std::is_same_v<T, std::array<double, 2>>) {
    if (!j.is_array() || j.size() != v.size()) bad(key, "expected an array of " + std::to_string(v.size()) + " numbers");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = as_double(j[i], key);
  } else {
    static_assert(sizeof(T) == 0, "no decoder");
  }
}

// --- schema visitors ----------------------------------------------------------

class Writer {
 public:
  explicit Writer(ojson& j) : j_(j) {}
  template <typename T>
  void field(const char* key, T& v) {
    j_[key] = encode(v);
  }
  template <typename F>
  void section(const char* key, F&& f) {
    ojson sub = ojson::object();
    Writer w(sub);
    f(w);
    j_[key] = std::move(sub);
  }

 private:
  ojson& j_;
};

class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) bad(prefix_.empty() ? "<root>" : prefix_, "expected a table");
  }
  template <typename T>
  void field(const char* key, T& v) {
    seen_.insert(key);
    if (j_.contains(key)) decode(j_.at(key), v, prefix_ + key);
  }
  template <typename F>
  void section(const char* key, F&& f) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Reader r(j_.at(key), prefix_ + key + ".");
    f(r);
    r.finish();
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(prefix_ + it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

template <typename V>
void visit_disturbance(V& v, DisturbanceParams& d) {
  v.field("k_vy", d.k_vy);
  v.field("k_vx", d.k_vx);
  v.field("k_w", d.k_w);
  v.field("noise_vx", d.noise_vx);
  v.field("noise_vy", d.noise_vy);
  v.field("noise_w", d.noise_w);
}

template <typename V>
void visit(V& v, ScenarioConfig& c) {
  v.field("seed", c.seed);
  v.field("map_path", c.map_path);
  v.field("models_dir", c.models_dir);
  v.section("world", [&](auto& w) {
    WorldGenConfig& g = c.world;
    w.field("preset", g.preset);
    w.field("size_x", g.size_x);
    w.field("size_y", g.size_y);
    w.field("resolution", g.resolution);
    w.field("mud_polygon", g.mud_polygon);
    w.field("obstacle_count", g.obstacle_count);
    w.field("obstacle_radius", g.obstacle_radius);
    w.field("obstacle_height", g.obstacle_height);
    w.field("obstacle_clearance", g.obstacle_clearance);
    w.section("hill", [&](auto& h) {
      h.field("center", g.hill.center);
      h.field("height", g.hill.height);
      h.field("sigma", g.hill.sigma);
    });
    w.section("traversability", [&](auto& t) {
      TraversabilityConfig& tc = g.traversability;
      t.field("w1", tc.weights.w1);
      t.field("w2", tc.weights.w2);
      t.field("w3", tc.weights.w3);
      t.field("t_max", tc.weights.t_max);
      t.field("max_slope", tc.scales.max_slope);
      t.field("max_roughness", tc.scales.max_roughness);
      t.field("max_step", tc.scales.max_step);
      t.field("radius", tc.radius);
    });
  });
  v.section("disturbance", [&](auto& d) {
    for (TerrainClass cls : kAllTerrainClasses) {
      const std::string name(terrain_name(cls));
      if (!c.world.disturbance.count(cls)) c.world.disturbance[cls] = DisturbanceParams::none();
      d.section(name.c_str(), [&](auto& s) { visit_disturbance(s, c.world.disturbance[cls]); });
    }
  });
  v.section("vehicle", [&](auto& w) {
    VehicleParams& p = c.vehicle;
    w.field("mass", p.mass);
    w.field("izz", p.izz);
    w.field("lf", p.lf);
    w.field("lr", p.lr);
    w.field("track_width", p.track_width);
    w.field("cg_height", p.cg_height);
    w.field("roll_center_height", p.roll_center_height);
    w.field("c_alpha_f", p.c_alpha_f);
    w.field("c_alpha_r", p.c_alpha_r);
    w.field("gravity", p.gravity);
    w.field("steer_max", p.steer_max);
    w.field("accel_min", p.accel_min);
    w.field("accel_max", p.accel_max);
    w.field("v_min", p.v_min);
    w.field("v_max", p.v_max);
    w.field("rollover_gravity_angle", p.rollover_gravity_angle);
  });
  v.section("mission", [&](auto& w) {
    MissionSpec& m = c.mission;
    Vec2 start = m.start.position();
    w.field("start", start);
    w.field("start_yaw", m.start.yaw);
    w.field("goal", m.goal);
    w.field("goal_radius", m.goal_radius);
    w.field("time_limit", m.time_limit);
    m.start.x = start.x();
    m.start.y = start.y();
    w.field("sim_dt", c.run.sim_dt);
    w.field("control_period", c.run.control_period);
    w.field("plan_period", c.run.plan_period);
  });
  v.section("planner", [&](auto& w) {
    PlannerConfig& p = c.run.planner;
    w.field("steer_samples", p.steer_samples);
    w.field("accel_samples", p.accel_samples);
    w.field("accel_span", p.accel_span);
    w.field("samples", p.samples);
    w.field("horizon", p.horizon);
    w.field("dt", p.dt);
    w.field("kernel_size", p.kernel_size);
    w.field("rollover_threshold", p.rollover_threshold);
    w.field("w_gp", p.w_gp);
    w.field("w_e", p.w_e);
    w.field("w_dist", p.w_dist);
    w.field("cov_regularizer", p.cov_regularizer);
  });
  v.section("mppi", [&](auto& w) {
    MppiConfig& m = c.run.mppi;
    w.field("rollouts", m.rollouts);
    w.field("horizon", m.horizon);
    w.field("dt", m.dt);
    w.field("lambda", m.lambda);
    w.field("sigma_steer", m.sigma_steer);
    w.field("sigma_accel", m.sigma_accel);
    w.field("q", m.q);
    w.field("r", m.r);
    w.field("off_map_penalty", m.off_map_penalty);
  });
  v.section("baseline", [&](auto& w) {
    BaselineConfig& b = c.run.baseline;
    w.field("lookahead", b.lookahead);
    w.field("speed", b.speed);
    w.field("speed_gain", b.speed_gain);
    w.field("untraversable", b.untraversable);
    w.field("inflation", b.inflation);
    w.field("mud_penalty", b.mud_penalty);
    w.field("astar_cost_weight", b.astar.cost_weight);
  });
  v.section("gp", [&](auto& w) {
    w.field("iterations", c.gp.fit.iterations);
    w.field("restarts", c.gp.fit.restarts);
    w.field("max_points", c.gp.fit.max_points);
    w.field("min_samples", c.gp.min_samples);
    w.field("collect_duration", c.gp.collection.duration);
    w.field("collect_sim_dt", c.gp.collection.sim_dt);
    w.field("collect_log_dt", c.gp.collection.log_dt);
    w.field("collect_time_constant", c.gp.collection.time_constant);
    w.field("collect_edge_margin", c.gp.collection.edge_margin);
  });
}

// --- TOML <-> JSON ------------------------------------------------------------

json toml_to_json(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = n.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = n.as_integer()) return v->get();
  if (const auto* v = n.as_floating_point()) return v->get();
  if (const auto* v = n.as_boolean()) return v->get();
  if (const auto* v = n.as_string()) return v->get();
  throw Error(ErrorCode::kConfig, "unsupported TOML value (dates and times are not used)");
}

void json_to_toml_array(const ojson& j, toml::array& out);

void json_to_toml_table(const ojson& j, toml::table& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const ojson& v = it.value();
    if (v.is_object()) {
      toml::table sub;
      json_to_toml_table(v, sub);
      out.insert(it.key(), std::move(sub));
    } else if (v.is_array()) {
      toml::array sub;
      json_to_toml_array(v, sub);
      out.insert(it.key(), std::move(sub));
    } else if (v.is_number_integer()) {
      out.insert(it.key(), v.get<std::int64_t>());
    } else if (v.is_number()) {
      out.insert(it.key(), v.get<double>());
    } else if (v.is_boolean()) {
      out.insert(it.key(), v.get<bool>());
    } else if (v.is_string()) {
      out.insert(it.key(), v.get<std::string>());
    }
  }
}

void json_to_toml_array(const ojson& j, toml::array& out) {
  for (const ojson& v : j) {
    if (v.is_array()) {
      toml::array sub;
      json_to_toml_array(v, sub);
      out.push_back(std::move(sub));
    } else if (v.is_number_integer()) {
      out.push_back(v.get<std::int64_t>());
    } else {
      out.push_back(v.get<double>());
    }
  }
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.mission.start = {c.world.start.x(), c.world.start.y(), 0.0, 0.0, 0.0, 0.0};
  c.mission.goal = c.world.goal;
  c.mission.goal_radius = 1.0;
  c.mission.time_limit = 60.0;
  // Exact GP prediction cost grows with n^2; 300 points keep a planning call
  // near one second on a single core.
  c.gp.fit.max_points = 300;
  return c;
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  ScenarioConfig copy = cfg;
  ojson j = ojson::object();
  Writer w(j);
  visit(w, copy);
  return j;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig c = default_scenario();
  Reader r(j, "");
  visit(r, c);
  r.finish();
  c.world.start = c.mission.start.position();
  c.world.goal = c.mission.goal;
  c.vehicle.validate();
  c.mission.validate();
  c.run.validate();
  c.world.traversability.weights.validate();
  return c;
}

std::string scenario_to_toml(const ScenarioConfig& cfg) {
  toml::table t;
  json_to_toml_table(scenario_to_json(cfg), t);
  std::ostringstream os;
  os << t << '\n';
  return os.str();
}

ScenarioConfig scenario_from_toml(const std::string& text) {
  try {
    const toml::table t = toml::parse(text);
    return scenario_from_json(toml_to_json(t));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::kConfig, os.str());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (is_json) {
    try {
      return scenario_from_json(json::parse(buf.str()));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfig, std::string("JSON config: ") + e.what());
    }
  }
  return scenario_from_toml(buf.str());
}

}  // namespace terranav::cli
