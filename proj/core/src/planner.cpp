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

#include "terranav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "terranav/parallel.hpp"

namespace terranav {

void PlannerConfig::validate() const {
  const bool ok = steer_samples >= 1 && accel_samples >= 1 && samples >= 1 && horizon >= 1 && dt > 0 &&
                  kernel_size >= 1 && kernel_size % 2 == 1 && cov_regularizer > 0 && accel_span >= 0;
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "planner configuration out of range");
}

bool PathCandidate::truncated() const {
  if (nominal.truncated) return true;
  return std::any_of(samples.begin(), samples.end(), [](const Rollout& r) { return r.truncated; });
}

namespace {

std::vector<double> symmetric_grid(int n, double half_width) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (n == 1) return out;
  // Integer numerator keeps the grid exactly antisymmetric about 0.
  for (int i = 0; i < n; ++i) out[i] = half_width * (2 * i - (n - 1)) / (n - 1);
  return out;
}

// Attitude at s if the terrain supports it there.
std::optional<Attitude> try_attitude(const TerrainWorld& world, const VehicleState& s) {
  if (!world.supports(s.position())) return std::nullopt;
  try {
    return world.attitude(s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct PredictiveJob {
  VehicleState x0;
  ControlInput u;
  RandomStream rng;
  Rollout out;
};

// Row-chunked batch prediction; chunk boundaries do not depend on the thread count.
void predict_chunked(const GpModel& model, const GpInputBatch& q, Eigen::MatrixX3d& mean,
                     Eigen::MatrixX3d& var) {
  constexpr Eigen::Index kChunk = 64;
  const Eigen::Index rows = q.rows();
  mean.resize(rows, 3);
  var.resize(rows, 3);
  const Eigen::Index chunks = (rows + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Eigen::Index begin = static_cast<Eigen::Index>(c) * kChunk;
    const Eigen::Index len = std::min(kChunk, rows - begin);
    const GpInputBatch block = q.middleRows(begin, len);
    Eigen::MatrixX3d m, v;
    model.predict(block, m, v);
    mean.middleRows(begin, len) = m;
    var.middleRows(begin, len) = v;
  });
}

void propagate_predictive(std::vector<PredictiveJob>& jobs, const TerrainWorld& world, const GpRegistry& registry,
                          const PlannerConfig& cfg, const VehicleParams& p) {
  const std::size_t count = jobs.size();
  std::vector<char> alive(count, 0);
  for (std::size_t j = 0; j < count; ++j) {
    PredictiveJob& job = jobs[j];
    job.out.states.assign(1, job.x0);
    job.out.attitudes.clear();
    job.out.truncated = false;
    if (auto att = try_attitude(world, job.x0)) {
      job.out.attitudes.push_back(*att);
      alive[j] = 1;
    } else {
      job.out.truncated = true;
    }
  }

  std::vector<VehicleState> next(count);
  std::vector<GpInput> features(count);
  std::vector<TerrainClass> terrain(count);
  for (int k = 0; k < cfg.horizon; ++k) {
    parallel_for(count, [&](std::size_t j) {
      if (!alive[j]) return;
      const PredictiveJob& job = jobs[j];
      const VehicleState& s = job.out.states.back();
      const Attitude& att = job.out.attitudes.back();
      const ControlInput u = governed_input(s, job.u, p);
      next[j] = step(s, u, att, p, cfg.dt);
      features[j] = gp_features(s, att, u);
      terrain[j] = world.terrain_at(s.position());
    });

    std::vector<Vec3> mean(count, Vec3::Zero()), stddev(count, Vec3::Zero());
    for (TerrainClass c : kAllTerrainClasses) {
      std::vector<std::size_t> rows;
      for (std::size_t j = 0; j < count; ++j) {
        if (alive[j] && terrain[j] == c) rows.push_back(j);
      }
      if (rows.empty()) continue;
      const GpModel& model = registry.at(c);
      GpInputBatch q(static_cast<Eigen::Index>(rows.size()), kGpInputDim);
      for (std::size_t r = 0; r < rows.size(); ++r) q.row(static_cast<Eigen::Index>(r)) = features[rows[r]].transpose();
      Eigen::MatrixX3d mu, var;
      predict_chunked(model, q, mu, var);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        mean[rows[r]] = mu.row(static_cast<Eigen::Index>(r)).transpose();
        stddev[rows[r]] = var.row(static_cast<Eigen::Index>(r)).transpose().cwiseSqrt();
      }
    }

    parallel_for(count, [&](std::size_t j) {
      if (!alive[j]) return;
      PredictiveJob& job = jobs[j];
      VehicleState s = next[j];
      Vec3 residual;
      for (int d = 0; d < 3; ++d) residual[d] = mean[j][d] + stddev[j][d] * standard_normal(job.rng);
      s.vx = std::max(s.vx + residual[0], 0.0);
      s.vy += residual[1];
      s.wz += residual[2];
      auto att = try_attitude(world, s);
      if (!att) {
        job.out.truncated = true;
        alive[j] = 0;
        return;
      }
      job.out.states.push_back(s);
      job.out.attitudes.push_back(*att);
    });
  }
}

}  // namespace

std::vector<ControlInput> sample_inputs(const PlannerConfig& cfg, const VehicleParams& p) {
  if (cfg.steer_samples < 1 || cfg.accel_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample_inputs: grid sizes must be >= 1");
  }
  const auto steers = symmetric_grid(cfg.steer_samples, p.steer_max);
  const auto accels = symmetric_grid(cfg.accel_samples, cfg.accel_span);
  std::vector<ControlInput> out;
  out.reserve(steers.size() * accels.size());
  for (double d : steers) {
    for (double a : accels) out.push_back({d, a});
  }
  return out;
}

Rollout rollout_nominal(const VehicleState& x0, const ControlInput& u, const TerrainWorld& world,
                        const PlannerConfig& cfg, const VehicleParams& p) {
  Rollout r;
  r.states.push_back(x0);
  auto att = try_attitude(world, x0);
  if (!att) {
    r.truncated = true;
    return r;
  }
  r.attitudes.push_back(*att);
  for (int k = 0; k < cfg.horizon; ++k) {
    const VehicleState& s = r.states.back();
    const VehicleState n = step(s, governed_input(s, u, p), r.attitudes.back(), p, cfg.dt);
    att = try_attitude(world, n);
    if (!att) {
      r.truncated = true;
      break;
    }
    r.states.push_back(n);
    r.attitudes.push_back(*att);
  }
  return r;
}

std::vector<Rollout> rollout_predictive(const VehicleState& x0, const ControlInput& u, const TerrainWorld& world,
                                        const GpRegistry& registry, const PlannerConfig& cfg,
                                        const VehicleParams& p, std::uint64_t seed, int candidate_index) {
  std::vector<PredictiveJob> jobs;
  jobs.reserve(static_cast<std::size_t>(cfg.samples));
  for (int m = 0; m < cfg.samples; ++m) {
    jobs.push_back({x0, u, derive_stream(seed, {static_cast<std::uint64_t>(candidate_index), static_cast<std::uint64_t>(m)}), {}});
  }
  propagate_predictive(jobs, world, registry, cfg, p);
  std::vector<Rollout> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(std::move(j.out));
  return out;
}

PathMoments distribution_moments(std::span<const Rollout> samples, double eps) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples, "distribution_moments: need at least two samples");
  }
  std::size_t len = samples.front().states.size();
  for (const Rollout& r : samples) len = std::min(len, r.states.size());
  const double m = static_cast<double>(samples.size());
  PathMoments out;
  for (std::size_t k = 1; k < len; ++k) {
    Vec2 mean = Vec2::Zero();
    for (const Rollout& r : samples) mean += r.states[k].position();
    mean /= m;
    Mat2 cov = Mat2::Zero();
    for (const Rollout& r : samples) {
      const Vec2 d = r.states[k].position() - mean;
      cov += d * d.transpose();
    }
    cov /= (m - 1.0);
    cov += eps * Mat2::Identity();
    out.mean.push_back(mean);
    out.covariance.push_back(cov);
  }
  return out;
}

double smoothed_traversability(const Vec2& mean, const Mat2& cov, const GridMap2D& cost, int s, double fill) {
  const CostPatch patch = submap(cost, mean, s, fill);
  const Mat2 info = cov.inverse();
  std::vector<double> exponent(patch.values.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < exponent.size(); ++j) {
    const Vec2 d = patch.centers[j] - mean;
    exponent[j] = -0.5 * d.dot(info * d);
    peak = std::max(peak, exponent[j]);
  }
  // Shifting by the peak exponent cancels in the normalization and keeps the
  // near-delta kernel from underflowing to 0/0.
  double weight_sum = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < exponent.size(); ++j) {
    const double w = std::exp(exponent[j] - peak);
    weight_sum += w;
    acc += w * patch.values[j];
  }
  return acc / weight_sum;
}

double mahalanobis_deviation(const Vec2& nominal, const Vec2& mean, const Mat2& cov) {
  const Vec2 d = nominal - mean;
  return std::sqrt(std::max(0.0, d.dot(cov.inverse() * d)));
}

double candidate_cost(const PathCandidate& cand, const PlannerConfig& cfg) {
  if (cand.truncated()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t k = 0; k < cand.t_gp.size(); ++k) total += cfg.w_gp * cand.t_gp[k] + cfg.w_e * cand.deviation[k];
  return total;
}

namespace {

bool rollout_within_threshold(const Rollout& r, const ControlInput& u, double threshold, const VehicleParams& p) {
  for (std::size_t k = 1; k < r.states.size(); ++k) {
    const VehicleState& s = r.states[k];
    try {
      if (!(rollover_index(s, governed_input(s, u, p), r.attitudes[k], p) <= threshold)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<int> safe_set(std::span<const PathCandidate> candidates, const PlannerConfig& cfg,
                          const VehicleParams& p) {
  std::vector<int> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const PathCandidate& c = candidates[i];
    if (c.truncated()) continue;
    bool ok = rollout_within_threshold(c.nominal, c.input, cfg.rollover_threshold, p);
    for (std::size_t m = 0; ok && m < c.samples.size(); ++m) {
      ok = rollout_within_threshold(c.samples[m], c.input, cfg.rollover_threshold, p);
    }
    if (ok) out.push_back(static_cast<int>(i));
  }
  return out;
}

PlanResult select_best(std::vector<PathCandidate> candidates, const std::vector<int>& safe, const Vec2& goal,
                       const PlannerConfig& cfg, const VehicleParams& p) {
  for (PathCandidate& c : candidates) {
    c.goal_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < c.nominal.states.size(); ++k) {
      c.goal_distance = std::min(c.goal_distance, (c.nominal.states[k].position() - goal).norm());
    }
    c.safe = false;
  }
  for (int i : safe) candidates[static_cast<std::size_t>(i)].safe = true;

  PlanResult result;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i : safe) {
    const PathCandidate& c = candidates[static_cast<std::size_t>(i)];
    const double score = c.cost + cfg.w_dist * c.goal_distance;
    if (!std::isfinite(score)) continue;
    bool better = result.selected < 0 || score < best_score;
    if (!better && score == best_score) {
      const double cur = std::abs(candidates[static_cast<std::size_t>(result.selected)].input.steer);
      const double mine = std::abs(c.input.steer);
      better = mine < cur || (mine == cur && i < result.selected);
    }
    if (better) {
      result.selected = i;
      best_score = score;
    }
  }

  result.safe_set = safe;
  if (result.selected < 0) {
    result.fallback = true;
    result.command = {0.0, p.accel_min};
    if (!candidates.empty()) result.path.states.assign(1, candidates.front().nominal.states.front());
  } else {
    const PathCandidate& c = candidates[static_cast<std::size_t>(result.selected)];
    result.command = c.input;
    result.path = c.nominal;
  }
  result.candidates = std::move(candidates);
  return result;
}

PlanResult plan_local_path(const VehicleState& x0, const Vec2& goal, const TerrainWorld& world,
                           const GpRegistry& registry, const PlannerConfig& cfg, const VehicleParams& p,
                           std::uint64_t seed) {
  cfg.validate();
  const std::vector<ControlInput> inputs = sample_inputs(cfg, p);
  const std::size_t count = inputs.size();
  const auto samples = static_cast<std::size_t>(cfg.samples);

  std::vector<PathCandidate> candidates(count);
  parallel_for(count, [&](std::size_t i) {
    candidates[i].input = inputs[i];
    candidates[i].nominal = rollout_nominal(x0, inputs[i], world, cfg, p);
  });

  std::vector<PredictiveJob> jobs;
  jobs.reserve(count * samples);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t m = 0; m < samples; ++m) {
      jobs.push_back({x0, inputs[i], derive_stream(seed, {i, m}), {}});
    }
  }
  propagate_predictive(jobs, world, registry, cfg, p);

  const GridMap2D& cost = world.traversability();
  parallel_for(count, [&](std::size_t i) {
    PathCandidate& c = candidates[i];
    c.samples.reserve(samples);
    for (std::size_t m = 0; m < samples; ++m) c.samples.push_back(std::move(jobs[i * samples + m].out));
    if (!c.truncated() && c.samples.size() >= 2) {
      PathMoments moments = distribution_moments(c.samples, cfg.cov_regularizer);
      c.mean = std::move(moments.mean);
      c.covariance = std::move(moments.covariance);
      for (std::size_t k = 0; k < c.mean.size(); ++k) {
        c.t_gp.push_back(smoothed_traversability(c.mean[k], c.covariance[k], cost, cfg.kernel_size, world.t_max()));
        c.deviation.push_back(mahalanobis_deviation(c.nominal.states[k + 1].position(), c.mean[k], c.covariance[k]));
      }
    }
    c.cost = c.samples.size() >= 2 ? candidate_cost(c, cfg) : std::numeric_limits<double>::infinity();
  });

  const std::vector<int> safe = safe_set(candidates, cfg, p);
  return select_best(std::move(candidates), safe, goal, cfg, p);
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json points_json(const std::vector<Vec2>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const Vec2& q : pts) out.push_back({q.x(), q.y()});
  return out;
}

}  // namespace

std::string plan_result_to_json(const PlanResult& result) {
  using nlohmann::json;
  json j;
  j["selected"] = result.selected;
  j["fallback"] = result.fallback;
  j["command"] = {{"steer", result.command.steer}, {"accel", result.command.accel}};
  json path = json::array();
  for (const VehicleState& s : result.path.states) path.push_back({s.x, s.y, s.yaw, s.vx, s.vy, s.wz});
  j["path"] = std::move(path);
  j["safe_set"] = result.safe_set;
  json cands = json::array();
  for (const PathCandidate& c : result.candidates) {
    std::vector<Vec2> nominal;
    for (const VehicleState& s : c.nominal.states) nominal.push_back(s.position());
    json t_gp = json::array(), dev = json::array();
    for (double v : c.t_gp) t_gp.push_back(finite_or_null(v));
    for (double v : c.deviation) dev.push_back(finite_or_null(v));
    cands.push_back({{"steer", c.input.steer},
                     {"accel", c.input.accel},
                     {"cost", finite_or_null(c.cost)},
                     {"goal_distance", finite_or_null(c.goal_distance)},
                     {"safe", c.safe},
                     {"truncated", c.truncated()},
                     {"nominal", points_json(nominal)},
                     {"mean", points_json(c.mean)},
                     {"t_gp", std::move(t_gp)},
                     {"deviation", std::move(dev)}});
  }
  j["candidates"] = std::move(cands);
  return j.dump();
}

}  // namespace terranav
