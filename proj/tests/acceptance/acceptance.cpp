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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion that applies to this host fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "terranav/dynamics.hpp"
#include "terranav/error.hpp"
#include "terranav/gp.hpp"
#include "terranav/parallel.hpp"
#include "terranav/planner.hpp"
#include "terranav/random.hpp"
#include "terranav/sim_world.hpp"
#include "terranav/tracker.hpp"
#include "terranav_cli/commands.hpp"

namespace terranav::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass = false;
  std::string detail;
  bool applies = true;  // false when the host does not meet the criterion's stated hardware
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double uniform(RandomStream& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

TerrainWorld flat_world(TerrainClass cls, DisturbanceParams d, int width = 80, int height = 60) {
  GridGeometry g;
  g.resolution = 0.5;
  g.origin = {0.25, 0.25};
  g.width = width;
  g.height = height;
  return TerrainWorld(GridMap2D(g, 0.0), TerrainTypeMap(g, cls), TraversabilityConfig{}, {{cls, d}}, {});
}

// ---------------------------------------------------------------------------
// 1. Flat-ground reduction and load balance.

// Planar dynamic bicycle with load-proportional linear tires and
// longitudinal load transfer, coded from scratch.
Vec6 planar_bicycle(const Vec6& x, const ControlInput& u, const VehicleParams& p) {
  const double yaw = x[2], vx = x[3], vy = x[4], wz = x[5];
  const double l = p.lf + p.lr, m = p.mass, g = p.gravity;
  const double load_f = (p.lr * m * g + p.cg_height * m * u.accel) / l;
  const double load_r = (p.lf * m * g - p.cg_height * m * u.accel) / l;
  const double v = std::max(vx, p.v_min);
  const double fy_f = p.c_alpha_f * load_f * (u.steer - (vy + p.lf * wz) / v);
  const double fy_r = p.c_alpha_r * load_r * ((p.lr * wz - vy) / v);
  Vec6 d;
  d << vx * std::cos(yaw) - vy * std::sin(yaw), vx * std::sin(yaw) + vy * std::cos(yaw), wz, u.accel,
      (fy_f + fy_r) / m - vx * wz, (p.lf * fy_f * std::cos(u.steer) - p.lr * fy_r) / p.izz;
  return d;
}

Vec6 planar_step(const Vec6& x0, const ControlInput& u, const VehicleParams& p, double dt, int n) {
  const double h = dt / n;
  Vec6 x = x0;
  for (int i = 0; i < n; ++i) {
    const Vec6 k1 = planar_bicycle(x, u, p);
    const Vec6 k2 = planar_bicycle(x + 0.5 * h * k1, u, p);
    const Vec6 k3 = planar_bicycle(x + 0.5 * h * k2, u, p);
    const Vec6 k4 = planar_bicycle(x + h * k3, u, p);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  x[3] = std::max(x[3], 0.0);
  return x;
}

Verdict criterion_dynamics() {
  const VehicleParams p;
  const TerrainWorld world = flat_world(TerrainClass::kGrass, DisturbanceParams::none(), 200, 200);
  RandomStream rng(101);
  double max_step_err = 0.0;
  for (int traj = 0; traj < 20; ++traj) {
    VehicleState s{uniform(rng, 45, 55), uniform(rng, 45, 55), uniform(rng, -kPi, kPi), uniform(rng, 0, 3), 0, 0};
    for (int k = 0; k < 50; ++k) {
      const ControlInput u = governed_input(s, {uniform(rng, -0.35, 0.35), uniform(rng, -3, 3)}, p);
      const VehicleState next = step(s, u, world.attitude(s), p, 0.1);
      const Vec6 expect = planar_step(s.to_vector(), u, p, 0.1, substep_count(s, p, 0.1));
      max_step_err = std::max(max_step_err, (next.to_vector() - expect).cwiseAbs().maxCoeff());
      s = next;
    }
  }
  double max_load_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Attitude a{uniform(rng, -0.7, 0.7), uniform(rng, -0.7, 0.7), uniform(rng, -kPi, kPi)};
    const VehicleState s{0, 0, a.yaw, uniform(rng, 0, 4), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const TerrainForces f = terrain_forces(s, {uniform(rng, -0.35, 0.35), uniform(rng, -3, 3)}, a, p);
    max_load_err = std::max(max_load_err, std::abs(f.load_front + f.load_rear -
                                                   p.mass * p.gravity * std::cos(a.pitch) * std::cos(a.roll)));
  }
  return {max_step_err <= 1e-9 && max_load_err <= 1e-12,
          "max per-step deviation " + fmt("%.2e", max_step_err) + " (<= 1e-9), max load residual " +
              fmt("%.2e", max_load_err) + " (<= 1e-12)"};
}

// ---------------------------------------------------------------------------
// 2. GP correctness.

SeHyper iso_hyper(double sf2, double ell, double sn2) {
  SeHyper h;
  h.log_signal_var = std::log(sf2);
  h.log_length.fill(std::log(ell));
  h.log_noise_var = std::log(sn2);
  return h;
}

Eigen::MatrixXd random_inputs(RandomStream& rng, int n, double scale) {
  Eigen::MatrixXd x(n, kGpInputDim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < kGpInputDim; ++d) x(i, d) = scale * standard_normal(rng);
  return x;
}

double two_point_error() {
  const SeHyper h = iso_hyper(0.7, 1.1, 0.05);
  GpInput a = GpInput::Zero(), b = GpInput::Zero(), q = GpInput::Zero();
  a[0] = 0.3;
  b[0] = 1.2;
  b[3] = -0.4;
  q[0] = 0.7;
  q[3] = 0.2;
  q[6] = 0.5;
  Eigen::MatrixXd x(2, kGpInputDim);
  x.row(0) = a.transpose();
  x.row(1) = b.transpose();
  const Eigen::Vector2d y(0.8, -0.3);
  const ScalarGp gp(x, y, h);
  auto kern = [](const GpInput& u, const GpInput& v) { return 0.7 * std::exp(-0.5 * (u - v).squaredNorm() / 1.21); };
  const double k11 = kern(a, a) + 0.05, k22 = kern(b, b) + 0.05, k12 = kern(a, b);
  const double det = k11 * k22 - k12 * k12;
  const double i11 = k22 / det, i22 = k11 / det, i12 = -k12 / det;
  const double s1 = kern(q, a), s2 = kern(q, b);
  const double mean = s1 * (i11 * y[0] + i12 * y[1]) + s2 * (i12 * y[0] + i22 * y[1]);
  const double var = 0.7 - (s1 * s1 * i11 + 2 * s1 * s2 * i12 + s2 * s2 * i22);
  GpInputBatch qb(1, kGpInputDim);
  qb.row(0) = q.transpose();
  Eigen::VectorXd m(1), v(1);
  gp.predict(qb, m, v);
  return std::max(std::abs(m[0] - mean), std::abs(v[0] - var));
}

// Largest |fitted - true| log-hyperparameter over the three outputs.
double recovery_error(std::uint64_t seed) {
  const SeHyper truth = iso_hyper(1.0, 1.0, 0.01);
  RandomStream rng(seed);
  const int n = 200;
  const Eigen::MatrixXd x = random_inputs(rng, n, 0.4);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = se_kernel(x.row(i).transpose(), x.row(j).transpose(), truth);
  k.diagonal().array() += 1e-10;
  const Eigen::MatrixXd l = k.llt().matrixL();
  std::array<Eigen::VectorXd, kGpOutputDim> f;
  for (auto& fi : f) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = standard_normal(rng);
    fi = l * z;
    for (int i = 0; i < n; ++i) fi[i] += std::sqrt(truth.noise_var()) * standard_normal(rng);
  }
  GpDataset data;
  for (int i = 0; i < n; ++i) data.append(x.row(i).transpose(), Vec3(f[0][i], f[1][i], f[2][i]));
  GpFitOptions opt;
  opt.seed = seed + 8;
  const GpModel model = fit(data, opt);
  const SeHyper::Vector t = truth.to_vector();
  double worst = 0.0;
  for (int o = 0; o < kGpOutputDim; ++o)
    worst = std::max(worst, (model.output(o).hyper().to_vector() - t).cwiseAbs().maxCoeff());
  return worst;
}

double gradient_error() {
  RandomStream rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 15 + 5 * trial;
    const Eigen::MatrixXd x = random_inputs(rng, n, 1.0);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(x(i, 0)) * x(i, 3) + 0.1 * standard_normal(rng);
    SeHyper h = iso_hyper(0.8, 1.2, 0.05);
    for (int d = 0; d < kGpInputDim; ++d) h.log_length[d] += 0.3 * standard_normal(rng);
    SeHyper::Vector grad;
    log_marginal_likelihood(x, y, h, &grad);
    const SeHyper::Vector v0 = h.to_vector();
    for (int k = 0; k < SeHyper::kSize; ++k) {
      const double eps = 1e-5;
      SeHyper::Vector vp = v0, vm = v0;
      vp[k] += eps;
      vm[k] -= eps;
      const double fd = (*log_marginal_likelihood(x, y, SeHyper::from_vector(vp)) -
                         *log_marginal_likelihood(x, y, SeHyper::from_vector(vm))) /
                        (2 * eps);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1.0, std::abs(grad[k])));
    }
  }
  return worst;
}

Verdict criterion_gp() {
  const double closed = two_point_error();
  int recovered = 0;
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    const double e = recovery_error(seed);
    if (e <= 0.5) ++recovered;
    per_seed += (per_seed.empty() ? "" : ", ") + fmt("%.2f", e);
  }
  const double grad = gradient_error();
  return {closed <= 1e-9 && recovered == 3 && grad <= 1e-5,
          "two-point error " + fmt("%.1e", closed) + ", recovery " + std::to_string(recovered) +
              "/3 seeds within 0.5 (worst " + per_seed + "), gradient rel. error " + fmt("%.1e", grad)};
}

// ---------------------------------------------------------------------------
// 3. Cost identities.

Verdict criterion_costs() {
  RandomStream rng(303);
  GridGeometry g;
  g.resolution = 0.5;
  g.origin = {0.25, 0.25};
  g.width = g.height = 20;
  double uniform_err = 0.0, delta_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double level = uniform(rng, 0, 1);
    const GridMap2D flat(g, level);
    Mat2 a;
    a << uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1);
    const Mat2 cov = a * a.transpose() + 0.01 * Mat2::Identity();
    const Vec2 q(uniform(rng, 1, 9), uniform(rng, 1, 9));
    uniform_err = std::max(uniform_err, std::abs(smoothed_traversability(q, cov, flat, 5, 1.0) - level));

    GridMap2D cost(g, 0.0);
    for (double& v : cost.values()) v = uniform(rng, 0, 1);
    // Keep the query off cell edges so the limit is the centre cell.
    const Cell c{static_cast<int>(uniform(rng, 2, 17)), static_cast<int>(uniform(rng, 2, 17))};
    const Vec2 p = g.cell_center(c) + Vec2(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
    delta_err = std::max(delta_err, std::abs(smoothed_traversability(p, 1e-6 * Mat2::Identity(), cost, 5, 1.0) - cost[c]));
  }
  double maha_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vec2 a(uniform(rng, -5, 5), uniform(rng, -5, 5)), b(uniform(rng, -5, 5), uniform(rng, -5, 5));
    maha_err = std::max(maha_err, std::abs(mahalanobis_deviation(a, b, Mat2::Identity()) - (a - b).norm()));
  }

  // Zero-residual planning against a nominal-only traversability ranking.
  GpRegistry zero;
  zero.set(TerrainClass::kGrass, zero_residual_model());
  zero.set(TerrainClass::kMud, zero_residual_model());
  const VehicleParams p;
  PlannerConfig cfg;
  cfg.samples = 2;
  // The identity holds as the covariance vanishes; at the default 1e-6 m^2 a
  // nominal point within ~1 mm of a cell edge still splits weight between cells.
  cfg.cov_regularizer = 1e-12;
  int scenes_ok = 0;
  for (int scene = 0; scene < 100; ++scene) {
    const TerrainWorld world = generate_world(WorldGenConfig{}, 1000 + scene / 10);
    const VehicleState x0{uniform(rng, 6, 34), uniform(rng, 6, 24), uniform(rng, -kPi, kPi), uniform(rng, 0.5, 2.5),
                          0, 0};
    const Vec2 goal(uniform(rng, 1, 39), uniform(rng, 1, 29));
    const PlanResult r = plan_local_path(x0, goal, world, zero, cfg, p, 7000 + scene);
    std::vector<double> oracle(r.candidates.size(), kInf), got(r.candidates.size(), kInf);
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const PathCandidate& c = r.candidates[i];
      got[i] = c.cost + cfg.w_dist * c.goal_distance;
      if (c.nominal.truncated) continue;
      double sum = 0.0, dist = kInf;
      for (std::size_t k = 1; k < c.nominal.states.size(); ++k) {
        const Vec2 q = c.nominal.states[k].position();
        sum += cfg.w_gp * world.traversability()[world.geometry().cell_at(q)];
        dist = std::min(dist, (q - goal).norm());
      }
      oracle[i] = sum + cfg.w_dist * dist;
    }
    bool same = true;
    for (std::size_t i = 0; i < oracle.size() && same; ++i)
      for (std::size_t j = 0; j < oracle.size() && same; ++j)
        if (oracle[i] + 1e-9 < oracle[j]) same = got[i] < got[j];
    if (!r.fallback) {
      double best = kInf;
      for (int i : r.safe_set) best = std::min(best, oracle[static_cast<std::size_t>(i)]);
      same = same && oracle[static_cast<std::size_t>(r.selected)] <= best + 1e-9;
    }
    if (same) {
      ++scenes_ok;
    } else if (std::getenv("TERRANAV_ACCEPTANCE_DEBUG")) {
      for (std::size_t i = 0; i < oracle.size(); ++i)
        std::fprintf(stderr, "scene %d cand %zu oracle %.12f got %.12f\n", scene, i, oracle[i], got[i]);
    }
  }
  return {uniform_err <= 1e-12 && delta_err <= 1e-6 && maha_err == 0.0 && scenes_ok == 100,
          "uniform error " + fmt("%.1e", uniform_err) + ", delta-limit error " + fmt("%.1e", delta_err) +
              ", Mahalanobis-Euclidean gap " + fmt("%.1e", maha_err) + ", ranking match " +
              std::to_string(scenes_ok) + "/100 scenes"};
}

// ---------------------------------------------------------------------------
// 4. Safety filter.

Rollout random_rollout(RandomStream& rng, int n, double aggression) {
  Rollout r;
  for (int k = 0; k <= n; ++k) {
    r.states.push_back({0, 0, uniform(rng, -kPi, kPi), uniform(rng, 0, 3), aggression * uniform(rng, -1, 1),
                        aggression * uniform(rng, -2, 2)});
    r.attitudes.push_back({aggression * uniform(rng, -0.4, 0.4), aggression * uniform(rng, -0.4, 0.4), r.states.back().yaw});
  }
  r.truncated = uniform(rng, 0, 1) < 0.03;
  return r;
}

std::vector<int> scan(const std::vector<PathCandidate>& cands, double thres, const VehicleParams& p) {
  std::vector<int> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const PathCandidate& c = cands[i];
    bool ok = !c.nominal.truncated;
    std::vector<const Rollout*> all{&c.nominal};
    for (const Rollout& s : c.samples) {
      all.push_back(&s);
      ok = ok && !s.truncated;
    }
    for (const Rollout* r : all) {
      for (std::size_t k = 1; ok && k < r->states.size(); ++k) {
        const VehicleState& s = r->states[k];
        double index = kInf;
        try {
          index = rollover_index(s, governed_input(s, c.input, p), r->attitudes[k], p);
        } catch (const Error&) {
        }
        ok = index <= thres;
      }
    }
    if (ok) out.push_back(static_cast<int>(i));
  }
  return out;
}

Verdict criterion_safety() {
  const VehicleParams p;
  PlannerConfig cfg;
  RandomStream rng(404);
  int matches = 0, monotone = 0, checks = 0;
  std::size_t safe_at_default = 0, total = 0;
  const std::vector<double> thresholds{0.0, 0.1, 0.2, cfg.rollover_threshold, 0.5, 0.8, 1.2};
  for (int batch = 0; batch < 1000; ++batch) {
    std::vector<PathCandidate> cands(static_cast<std::size_t>(1 + batch % 12));
    const double aggression = uniform(rng, 0.0, 0.4);
    for (PathCandidate& c : cands) {
      c.input = {uniform(rng, -0.35, 0.35), uniform(rng, -3, 3)};
      c.nominal = random_rollout(rng, 10, aggression);
      for (int m = 0; m < 3; ++m) c.samples.push_back(random_rollout(rng, 10, aggression));
    }
    bool all_match = true, mono = true;
    std::vector<int> prev;
    for (double thres : thresholds) {
      cfg.rollover_threshold = thres;
      const std::vector<int> got = safe_set(cands, cfg, p);
      all_match = all_match && got == scan(cands, thres, p);
      mono = mono && std::includes(got.begin(), got.end(), prev.begin(), prev.end());
      if (thres == 0.3) {
        safe_at_default += got.size();
        total += cands.size();
      }
      prev = got;
      ++checks;
    }
    matches += all_match;
    monotone += mono;
  }
  const bool default_ok = PlannerConfig{}.rollover_threshold == 0.3;
  return {matches == 1000 && monotone == 1000 && default_ok,
          "brute-force match " + std::to_string(matches) + "/1000 batches, monotone " + std::to_string(monotone) +
              "/1000, default threshold " + fmt("%.2f", PlannerConfig{}.rollover_threshold) + ", " +
              std::to_string(safe_at_default) + "/" + std::to_string(total) + " candidates safe at 0.3"};
}

// ---------------------------------------------------------------------------
// 5. Learned uncertainty separation.

double terminal_spread(const std::vector<Rollout>& rs) {
  Vec2 mean = Vec2::Zero();
  for (const Rollout& r : rs) mean += r.states.back().position();
  mean /= static_cast<double>(rs.size());
  double tr = 0.0;
  for (const Rollout& r : rs) tr += (r.states.back().position() - mean).squaredNorm();
  return tr / static_cast<double>(rs.size() - 1);
}

Verdict criterion_uncertainty(const cli::ScenarioConfig& cfg, const fs::path& models) {
  cli::ScenarioConfig flat = cfg;
  flat.world.obstacle_count = 0;
  const TerrainWorld world = generate_world(flat.world, cfg.seed);
  const GpRegistry reg = cli::load_registry(models, world);
  const PlannerConfig& pc = cfg.run.planner;
  double grass = 0.0, mud = 0.0;
  int pairs = 0;
  for (int i = 0; i < 20; ++i) {
    const double y = 6.0 + 0.55 * i;
    const ControlInput u{0.05 * (i % 3 - 1), 0.0};
    const VehicleState on_grass{3.0, y, 0, 2.0, 0, 0}, on_mud{15.0, y, 0, 2.0, 0, 0};
    if (world.terrain_at(on_grass.position()) != TerrainClass::kGrass ||
        world.terrain_at(on_mud.position()) != TerrainClass::kMud)
      continue;
    const auto g = rollout_predictive(on_grass, u, world, reg, pc, cfg.vehicle, 500 + i, 0);
    const auto m = rollout_predictive(on_mud, u, world, reg, pc, cfg.vehicle, 500 + i, 0);
    grass += terminal_spread(g);
    mud += terminal_spread(m);
    ++pairs;
  }
  grass /= pairs;
  mud /= pairs;
  const double ratio = mud / grass;
  return {pairs == 20 && ratio >= 2.0,
          std::to_string(pairs) + " pairs, mean terminal trace mud " + fmt("%.4f", mud) + " m^2, grass " +
              fmt("%.4f", grass) + " m^2, ratio " + fmt("%.2f", ratio) + " (>= 2)"};
}

// ---------------------------------------------------------------------------
// 6. Closed-loop comparison.

Verdict criterion_comparison(const cli::ExperimentReport& r, double minutes) {
  const auto& pro = r.summary.at(Stack::kProposed);
  const auto& b1 = r.summary.at(Stack::kBaseline1);
  const auto& b2 = r.summary.at(Stack::kBaseline2);
  const bool a = pro.successes >= b1.successes && pro.successes >= b2.successes;
  bool b = false;
  std::string len = "proposed mean length ";
  if (pro.mean_path_length && b2.mean_path_length) {
    b = *pro.mean_path_length <= *b2.mean_path_length;
    len += fmt("%.2f", *pro.mean_path_length) + " m vs baseline2 " + fmt("%.2f", *b2.mean_path_length) + " m";
  } else {
    len += "undefined (no successes to compare)";
  }
  const bool c = b1.mud_failures >= 1;
  std::ostringstream os;
  os << "successes " << pro.successes << "/" << b1.successes << "/" << b2.successes << " (proposed/b1/b2) "
     << (a ? "ok" : "violates (a)") << "; " << len << (b ? " ok" : " violates (b)") << "; baseline1 mud failures "
     << b1.mud_failures << (c ? " ok" : " violates (c)") << "; runtime " << fmt("%.1f", minutes) << " min";
  return {a && b && c && minutes < 30.0, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Tracking.

Verdict criterion_tracking() {
  const VehicleParams p;
  const TerrainWorld world = flat_world(TerrainClass::kGrass, DisturbanceParams::grass_default());
  std::vector<VehicleState> ref_states;
  for (int k = 0; k <= 100; ++k) ref_states.push_back({5.0 + 0.2 * k, 15.0, 0, 2.0, 0, 0});
  for (int k = 0; k < 30; ++k) ref_states.push_back({25.0, 15.0, 0, 0, 0, 0});
  const ReferencePath ref(0.0, 0.1, ref_states);
  MppiConfig cfg;
  VehicleState s{5, 15, 0, 2, 0, 0};
  std::vector<ControlInput> warm;
  RandomStream plant(17);
  double sq = 0.0;
  int n = 0;
  for (int k = 0; k < 100; ++k) {
    const MppiResult r = mppi_step(s, 0.1 * k, ref, world, p, cfg, warm, 7700 + k);
    warm = r.next_sequence;
    for (int j = 0; j < 5; ++j) s = true_step(s, governed_input(s, r.command, p), world, p, 0.02, plant);
    sq += (s.y - 15.0) * (s.y - 15.0);
    ++n;
  }
  const double rms = std::sqrt(sq / n);

  double worst = 0.0;
  const TerrainWorld flat = flat_world(TerrainClass::kGrass, DisturbanceParams::none());
  const Vec2 c(20, 15);
  for (double radius : {3.0, 4.0, 6.0, 9.0}) {
    std::vector<Vec2> path;
    for (int i = 0; i <= 2000; ++i) {
      const double a = -kPi / 2 + 4 * kPi * i / 2000;
      path.push_back(c + radius * Vec2(std::cos(a), std::sin(a)));
    }
    VehicleState q{c.x(), c.y() - radius, 0, 1.5, 0, 0};
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < 150; ++k) {
      const ControlInput u = pure_pursuit(q, path, 1.5, 1.5, p);
      if (k >= 100) {
        sum += u.steer;
        ++count;
      }
      q = step(q, governed_input(q, u, p), flat.attitude(q), p, 0.1);
    }
    const double expect = std::atan(p.wheelbase() / radius);
    worst = std::max(worst, std::abs(sum / count - expect) / expect);
  }
  return {rms < 0.3 && worst <= 0.1, "MPPI lateral RMS " + fmt("%.3f", rms) + " m over 20 m (< 0.3), pure pursuit " +
                                         "worst steady-state steering error " + fmt("%.1f", 100 * worst) + "% (<= 10%)"};
}

// ---------------------------------------------------------------------------
// 8. Latency budget.

Verdict criterion_latency(const cli::ScenarioConfig& cfg, const fs::path& models) {
  const TerrainWorld world = cli::scenario_world(cfg, cli::trial_world_seed(cfg, 0));
  const GpRegistry reg = cli::load_registry(models, world);
  PlannerConfig pc = cfg.run.planner;
  MppiConfig mc = cfg.run.mppi;
  const bool spec_shape = pc.steer_samples * pc.accel_samples == 63 && pc.samples == 20 && pc.horizon == 30 &&
                          mc.rollouts == 5000 && mc.horizon == 20;
  std::vector<double> plan_ms, track_ms;
  std::vector<VehicleState> ref_states;
  for (int k = 0; k <= 60; ++k) ref_states.push_back({3.0 + 0.2 * k, 12.0, 0, 2.0, 0, 0});
  const ReferencePath ref(0.0, 0.1, ref_states);
  std::vector<ControlInput> warm;
  for (int call = 0; call < 100; ++call) {
    const VehicleState x0{3.0 + 0.05 * call, 12.0, 0.0, 2.0, 0, 0};
    auto t0 = Clock::now();
    plan_local_path(x0, cfg.mission.goal, world, reg, pc, cfg.vehicle, 9000 + call);
    plan_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    t0 = Clock::now();
    const MppiResult r = mppi_step(x0, 0.0, ref, world, cfg.vehicle, mc, warm, 9500 + call);
    track_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    warm = r.next_sequence;
  }
  const cli::LatencySummary plan = cli::summarize_latency(plan_ms), track = cli::summarize_latency(track_ms);
  const unsigned cores = std::thread::hardware_concurrency();
  Verdict v;
  v.pass = spec_shape && plan.p95 <= 333.0 && track.p95 <= 100.0;
  v.applies = cores >= 8;
  v.detail = "plan p95 " + fmt("%.0f", plan.p95) + " ms (<= 333), MPPI p95 " + fmt("%.0f", track.p95) +
             " ms (<= 100), " + std::to_string(thread_count()) + " worker thread(s) on " + std::to_string(cores) +
             " hardware thread(s)";
  if (!v.applies) v.detail += "; criterion is specified for an 8-core host, not counted in the exit status";
  return v;
}

// ---------------------------------------------------------------------------
// 9. Determinism.

Verdict criterion_determinism(const cli::ScenarioConfig& cfg, const fs::path& first, const fs::path& second) {
  cli::RunOptions o;
  o.trials = 1;
  cli::cmd_run(cfg, o, second);
  int same = 0, total = 0;
  for (const char* stack : {"proposed", "baseline1", "baseline2"}) {
    for (const char* ext : {".json", ".csv"}) {
      const fs::path rel = fs::path("trials") / stack / (std::string("trial_000") + ext);
      ++total;
      if (cli::read_text(first / rel) == cli::read_text(second / rel)) ++same;
    }
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                             " trial log files byte-identical across two runs of trial 0"};
}

// ---------------------------------------------------------------------------

struct Runner {
  std::set<int> only;
  std::set<int> known_failures;  // analysed in the docs; reported but not counted
  int failures = 0;

  bool wanted(int id) const { return only.empty() || only.count(id) > 0; }

  void report(int id, const std::string& name, const std::function<Verdict()>& body) {
    if (!wanted(id)) return;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool known = known_failures.count(id) > 0;
    if (!v.pass && v.applies && !known) ++failures;
    if (!v.pass && known) v.detail += "; listed as a known failure, not counted in the exit status";
    std::printf("criterion %d: %s  %s: %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
};

}  // namespace
}  // namespace terranav::acceptance

int main(int argc, char** argv) {
  using namespace terranav;
  using namespace terranav::acceptance;
  CLI::App app{"terranav acceptance checks"};
  std::string work = (fs::temp_directory_path() / "terranav_acceptance").string();
  std::vector<int> only, known;
  int threads = 0;
  app.add_option("--work", work, "Scratch directory for trained models and run outputs");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--known-failures", known, "Criteria to report without counting in the exit status")
      ->delimiter(',');
  app.add_option("--threads", threads, "Worker threads (0 = runtime default)");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(threads);

  Runner run;
  run.only.insert(only.begin(), only.end());
  run.known_failures.insert(known.begin(), known.end());
  const fs::path root(work);
  const cli::ScenarioConfig cfg = cli::default_scenario();
  const fs::path run_dir = root / "run", repeat_dir = root / "run_repeat";

  run.report(1, "dynamics reduction", criterion_dynamics);
  run.report(2, "GP correctness", criterion_gp);
  run.report(3, "cost identities", criterion_costs);
  run.report(4, "safety filter", criterion_safety);
  run.report(7, "tracking", criterion_tracking);

  const bool need_models = run.wanted(5) || run.wanted(6) || run.wanted(8) || run.wanted(9);
  if (need_models) {
    std::error_code ec;
    fs::remove_all(root, ec);
    const auto t0 = Clock::now();
    try {
      cli::cmd_train(cfg, run_dir);
    } catch (const std::exception& e) {
      std::printf("training failed: %s\n", e.what());
      return 1;
    }
    std::printf("trained GP models in %.1f s\n", std::chrono::duration<double>(Clock::now() - t0).count());
    std::error_code copy_ec;
    fs::create_directories(repeat_dir);
    fs::copy(run_dir / "models", repeat_dir / "models", fs::copy_options::recursive, copy_ec);
  }
  const fs::path models = run_dir / "models";

  run.report(5, "learned-uncertainty separation", [&] { return criterion_uncertainty(cfg, models); });
  bool ran_experiment = false;
  run.report(6, "closed-loop comparison", [&] {
    cli::RunOptions o;
    o.trials = 10;
    const auto t0 = Clock::now();
    const cli::ExperimentReport r = cli::cmd_run(cfg, o, run_dir);
    ran_experiment = true;
    return criterion_comparison(r, std::chrono::duration<double>(Clock::now() - t0).count() / 60.0);
  });
  run.report(9, "determinism", [&] {
    if (!ran_experiment) {
      cli::RunOptions o;
      o.trials = 1;
      cli::cmd_run(cfg, o, run_dir);
    }
    return criterion_determinism(cfg, run_dir, repeat_dir);
  });
  run.report(8, "latency budget", [&] { return criterion_latency(cfg, models); });

  std::printf("acceptance: %s\n", run.failures == 0 ? "PASS" : "FAIL");
  return run.failures == 0 ? 0 : 1;
}
