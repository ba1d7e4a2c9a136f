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

#include "terranav_cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "terranav/error.hpp"
#include "terranav/map_io.hpp"
#include "terranav/parallel.hpp"
#include "terranav/random.hpp"

namespace terranav::cli {
namespace {

constexpr std::uint64_t kTagWorld = 1;
constexpr std::uint64_t kTagCollect = 2;
constexpr std::uint64_t kTagFit = 3;
constexpr std::uint64_t kTagMission = 4;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string trial_stem(int trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03d", trial);
  return buf;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(tag)) + index);
}

TerrainWorld scenario_world(const ScenarioConfig& cfg, std::uint64_t world_seed) {
  if (!cfg.map_path.empty()) {
    return world_from_map(read_map(cfg.map_path), cfg.world.traversability, cfg.world.disturbance);
  }
  return generate_world(cfg.world, world_seed);
}

std::uint64_t trial_world_seed(const ScenarioConfig& cfg, int trial) {
  return mix_seed(cfg.seed, kTagWorld, static_cast<std::uint64_t>(trial));
}

fs::path models_dir(const ScenarioConfig& cfg, const fs::path& out) {
  return cfg.models_dir.empty() ? out / "models" : fs::path(cfg.models_dir);
}

fs::path model_path(const fs::path& dir, TerrainClass c) {
  return dir / ("gp_" + std::string(terrain_name(c)) + ".json");
}

GpRegistry load_registry(const fs::path& dir, const TerrainWorld& world) {
  GpRegistry reg;
  for (TerrainClass c : world.classes_present()) {
    const fs::path p = model_path(dir, c);
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kConfig, "missing GP model '" + p.string() + "' (run the train command first)");
    }
    TerrainClass label{};
    GpModel m = load_gp_model(p.string(), &label);
    if (label != c) throw Error(ErrorCode::kConfig, "model file '" + p.string() + "' has a different terrain label");
    reg.set(c, std::move(m));
  }
  return reg;
}

fs::path cmd_genmap(const ScenarioConfig& cfg, const fs::path& out) {
  const TerrainWorld world = generate_world(cfg.world, cfg.seed);
  const fs::path path = out / "map.tnm";
  ensure_dir(out);
  write_map(path.string(), to_map_file(world));
  return path;
}

TrainSummary cmd_train(const ScenarioConfig& cfg, const fs::path& out) {
  const TerrainWorld world = scenario_world(cfg, cfg.seed);
  const std::vector<TerrainClass> classes = world.classes_present();
  if (classes.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "training needs a world with at least two terrain classes");
  }
  const TrainingData data =
      collect_training_data(world, cfg.vehicle, cfg.gp.collection, mix_seed(cfg.seed, kTagCollect));
  TrainSummary summary;
  for (TerrainClass c : classes) {
    auto it = data.by_class.find(c);
    const std::size_t n = it == data.by_class.end() ? 0 : it->second.size();
    summary.samples[c] = n;
    if (n < cfg.gp.min_samples) {
      throw Error(ErrorCode::kInsufficientData, "terrain '" + std::string(terrain_name(c)) + "' has " +
                                                    std::to_string(n) + " samples, need " +
                                                    std::to_string(cfg.gp.min_samples));
    }
  }
  const fs::path dir = models_dir(cfg, out);
  ensure_dir(dir);
  std::vector<GpModel> models(classes.size());
  std::vector<GpFitReport> reports(classes.size());
  parallel_for(classes.size(), [&](std::size_t i) {
    GpFitOptions opts = cfg.gp.fit;
    opts.seed = mix_seed(cfg.seed, kTagFit, static_cast<std::uint64_t>(classes[i]));
    models[i] = fit(data.by_class.at(classes[i]), opts, &reports[i]);
  });
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const fs::path p = model_path(dir, classes[i]);
    save_gp_model(p.string(), models[i], classes[i]);
    summary.final_lml[classes[i]] = reports[i].final_lml;
    summary.files.push_back(p);
  }
  return summary;
}

ExperimentReport cmd_run(const ScenarioConfig& cfg, const RunOptions& options, const fs::path& out) {
  if (options.trials < 1) throw Error(ErrorCode::kInvalidArgument, "run: trials must be >= 1");
  if (options.stacks.empty()) throw Error(ErrorCode::kInvalidArgument, "run: no stacks selected");
  ensure_dir(out);

  std::vector<TerrainWorld> worlds;
  worlds.reserve(static_cast<std::size_t>(options.trials));
  for (int t = 0; t < options.trials; ++t) worlds.push_back(scenario_world(cfg, trial_world_seed(cfg, t)));

  const bool needs_models =
      std::find(options.stacks.begin(), options.stacks.end(), Stack::kProposed) != options.stacks.end();
  GpRegistry registry;
  if (needs_models) registry = load_registry(models_dir(cfg, out), worlds.front());

  struct Job {
    int trial;
    Stack stack;
  };
  std::vector<Job> jobs;
  for (int t = 0; t < options.trials; ++t)
    for (Stack s : options.stacks) jobs.push_back({t, s});
  std::vector<TrialLog> logs(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    logs[j] = run_mission(worlds[job.trial], cfg.mission, job.stack, registry, cfg.vehicle, cfg.run,
                          mix_seed(cfg.seed, kTagMission, static_cast<std::uint64_t>(job.trial)));
  });

  ExperimentReport report;
  report.seed = cfg.seed;
  std::map<Stack, std::vector<double>> plan_ms, track_ms;
  std::ostringstream paths;
  paths << std::setprecision(10) << "stack,trial,t,x,y\n";
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const TrialLog& log = logs[j];
    const std::string stack(stack_name(log.stack));
    const fs::path stem = out / "trials" / stack / trial_stem(jobs[j].trial);
    write_text(stem.string() + ".json", trial_log_to_json(log));
    write_text(stem.string() + ".csv", trial_log_to_csv(log));
    report.rows.push_back(make_row(log, jobs[j].trial));
    plan_ms[log.stack].insert(plan_ms[log.stack].end(), log.plan_ms.begin(), log.plan_ms.end());
    track_ms[log.stack].insert(track_ms[log.stack].end(), log.track_ms.begin(), log.track_ms.end());
    for (std::size_t k = 0; k < log.records.size(); k += 5) {
      const TrialRecord& r = log.records[k];
      paths << stack << ',' << jobs[j].trial << ',' << r.t << ',' << r.state.x << ',' << r.state.y << '\n';
    }
  }
  report.summary = summarize(report.rows);
  for (auto& [s, v] : plan_ms) report.plan_latency[s] = summarize_latency(v);
  for (auto& [s, v] : track_ms) report.track_latency[s] = summarize_latency(v);

  write_text(out / "plot" / "paths.csv", paths.str());
  std::ostringstream obstacles;
  obstacles << "trial,x,y,radius\n";
  for (int t = 0; t < options.trials; ++t) {
    const TerrainWorld& w = worlds[t];
    for (const Obstacle& o : w.obstacles())
      obstacles << t << ',' << o.center.x() << ',' << o.center.y() << ',' << o.radius << '\n';
    std::ostringstream grid;
    grid << std::setprecision(8) << "x,y,elevation,t_geo,terrain\n";
    const GridGeometry& g = w.geometry();
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        const Vec2 p = g.cell_center({c, r});
        grid << p.x() << ',' << p.y() << ',' << w.elevation()(c, r) << ',' << w.traversability()(c, r) << ','
             << terrain_name(w.types()(c, r)) << '\n';
      }
    }
    write_text(out / "plot" / ("cost_map_" + trial_stem(t) + ".csv"), grid.str());
  }
  write_text(out / "plot" / "obstacles.csv", obstacles.str());
  write_text(out / "config.json", scenario_to_json(cfg).dump(2) + "\n");
  write_text(out / "report.json", report_to_json(report).dump(2) + "\n");
  return report;
}

std::string cmd_report(const fs::path& out) {
  const fs::path path = out / "report.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "cannot parse '" + path.string() + "': " + e.what());
  }
  const ExperimentReport report = report_from_json(j);
  const std::string table = format_table(report);
  write_text(out / "table.txt", table);
  return table;
}

}  // namespace terranav::cli
