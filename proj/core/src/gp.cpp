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

#include "terranav/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <nlohmann/json.hpp>

namespace terranav {

namespace {

constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};

// Box on the log-parameters; the optimizer treats points outside as infeasible.
constexpr double kLogSignalRange[2] = {-20.0, 10.0};
constexpr double kLogLengthRange[2] = {-7.0, 7.0};
constexpr double kLogNoiseRange[2] = {-20.0, 5.0};

Eigen::Matrix<double, 1, kGpInputDim> inverse_lengths(const SeHyper& h) {
  Eigen::Matrix<double, 1, kGpInputDim> inv;
  for (int d = 0; d < kGpInputDim; ++d) inv[d] = std::exp(-h.log_length[d]);
  return inv;
}

// Noise-free kernel matrix by explicit pairwise differences.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const SeHyper& h) {
  const Eigen::Index n = x.rows();
  const auto inv = inverse_lengths(h);
  const double sf2 = h.signal_var();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = sf2;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double sq = ((x.row(i) - x.row(j)).cwiseProduct(inv)).squaredNorm();
      k(i, j) = k(j, i) = sf2 * std::exp(-0.5 * sq);
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

std::optional<Factorization> factorize(const Eigen::MatrixXd& kf, double noise_var) {
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd k = kf;
    k.diagonal().array() += noise_var + jitter;
    Factorization f{Eigen::LLT<Eigen::MatrixXd>(k), jitter};
    if (f.llt.info() == Eigen::Success && f.llt.matrixLLT().diagonal().minCoeff() > 0.0) return f;
  }
  return std::nullopt;
}

bool within_box(const SeHyper& h) {
  auto inside = [](double v, const double (&r)[2]) { return std::isfinite(v) && v >= r[0] && v <= r[1]; };
  if (!inside(h.log_signal_var, kLogSignalRange) || !inside(h.log_noise_var, kLogNoiseRange)) return false;
  return std::all_of(h.log_length.begin(), h.log_length.end(),
                     [&](double v) { return inside(v, kLogLengthRange); });
}

class NegativeLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  NegativeLogLikelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) : x_(x), y_(y) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const SeHyper h = SeHyper::from_vector(Eigen::Map<const SeHyper::Vector>(parameters));
    if (!within_box(h)) return false;
    SeHyper::Vector g;
    const auto lml = log_marginal_likelihood(x_, y_, h, gradient != nullptr ? &g : nullptr);
    if (!lml || !std::isfinite(*lml)) return false;
    *cost = -*lml;
    if (gradient != nullptr) {
      if (!g.allFinite()) return false;
      Eigen::Map<SeHyper::Vector> out(gradient);
      out = -g;
    }
    return true;
  }

  int NumParameters() const override { return SeHyper::kSize; }

 private:
  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
};

SeHyper optimize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SeHyper& start, int iterations) {
  SeHyper::Vector params = start.to_vector();
  // GradientProblem takes ownership of the function.
  ceres::GradientProblem problem(new NegativeLogLikelihood(x, y));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = iterations;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, params.data(), &summary);
  return SeHyper::from_vector(params);
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n <= cap) return idx;
  RandomStream rng = derive_stream(seed, {0x5ab5ULL});
  // Partial Fisher-Yates keeps the choice uniform over all subsets.
  for (std::size_t i = 0; i < cap; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GpInput gp_features(const VehicleState& s, const Attitude& att, const ControlInput& u) {
  GpInput x;
  x << s.vx, s.vy, s.wz, att.roll, att.pitch, u.steer, u.accel;
  return x;
}

void GpDataset::append(const GpDataset& other) {
  inputs.insert(inputs.end(), other.inputs.begin(), other.inputs.end());
  outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
}

GpDataset residual_labels(std::span<const LogEntry> log, const VehicleParams& p) {
  if (log.size() < 2) throw Error(ErrorCode::kIngestion, "residual_labels: need at least two log entries");
  const double dt = log[1].t - log[0].t;
  if (!(dt > 0.0)) throw Error(ErrorCode::kIngestion, "residual_labels: timestamps must increase");
  for (std::size_t k = 1; k < log.size(); ++k) {
    const double gap = log[k].t - log[k - 1].t;
    if (std::abs(gap - dt) > 1e-9 + 1e-6 * dt) {
      throw Error(ErrorCode::kIngestion, "residual_labels: non-uniform time base");
    }
  }
  GpDataset data;
  data.inputs.reserve(log.size() - 1);
  data.outputs.reserve(log.size() - 1);
  for (std::size_t k = 1; k < log.size(); ++k) {
    const LogEntry& prev = log[k - 1];
    const VehicleState predicted = step(prev.state, prev.input, prev.attitude, p, dt);
    const VehicleState& measured = log[k].state;
    data.append(gp_features(prev.state, prev.attitude, prev.input),
                Vec3(measured.vx - predicted.vx, measured.vy - predicted.vy, measured.wz - predicted.wz));
  }
  return data;
}

SeHyper::Vector SeHyper::to_vector() const {
  Vector v;
  v[0] = log_signal_var;
  for (int d = 0; d < kGpInputDim; ++d) v[1 + d] = log_length[d];
  v[kSize - 1] = log_noise_var;
  return v;
}

SeHyper SeHyper::from_vector(const Vector& v) {
  SeHyper h;
  h.log_signal_var = v[0];
  for (int d = 0; d < kGpInputDim; ++d) h.log_length[d] = v[1 + d];
  h.log_noise_var = v[kSize - 1];
  return h;
}

double SeHyper::signal_var() const { return std::exp(log_signal_var); }
double SeHyper::noise_var() const { return std::exp(log_noise_var); }

double se_kernel(const GpInput& a, const GpInput& b, const SeHyper& h) {
  double sq = 0.0;
  for (int d = 0; d < kGpInputDim; ++d) {
    const double r = (a[d] - b[d]) * std::exp(-h.log_length[d]);
    sq += r * r;
  }
  return h.signal_var() * std::exp(-0.5 * sq);
}

std::optional<double> log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              const SeHyper& h, SeHyper::Vector* grad) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd kf = kernel_matrix(x, h);
  const auto fact = factorize(kf, h.noise_var());
  if (!fact) return std::nullopt;
  const Eigen::VectorXd alpha = fact->llt.solve(y);
  const double log_det_half = fact->llt.matrixLLT().diagonal().array().log().sum();
  const double lml = -0.5 * y.dot(alpha) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);

  if (grad != nullptr) {
    // d lml / d theta = 1/2 tr((a a^T - K^-1) dK/dtheta)
    const Eigen::MatrixXd k_inv = fact->llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd w = alpha * alpha.transpose() - k_inv;
    const Eigen::MatrixXd m = w.cwiseProduct(kf);
    const Eigen::VectorXd row_sum = m.rowwise().sum();
    (*grad)[0] = 0.5 * m.sum();
    for (int d = 0; d < kGpInputDim; ++d) {
      const Eigen::VectorXd xd = x.col(d);
      const double quad = 2.0 * xd.cwiseAbs2().dot(row_sum) - 2.0 * xd.dot(m * xd);
      (*grad)[1 + d] = 0.5 * quad * std::exp(-2.0 * h.log_length[d]);
    }
    (*grad)[SeHyper::kSize - 1] = 0.5 * h.noise_var() * w.trace();
  }
  return lml;
}

ScalarGp::ScalarGp(Eigen::MatrixXd x, Eigen::VectorXd y, const SeHyper& h)
    : hyper_(h), x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.cols() != kGpInputDim || y_.size() != x_.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "ScalarGp: inconsistent training data");
  }
  const Eigen::MatrixXd kf = kernel_matrix(x_, hyper_);
  auto fact = factorize(kf, hyper_.noise_var());
  if (!fact) throw Error(ErrorCode::kConditioning, "GP kernel matrix not positive definite after jitter");
  jitter_ = fact->jitter;
  chol_l_ = fact->llt.matrixL();
  alpha_ = fact->llt.solve(y_);
  lml_ = -0.5 * y_.dot(alpha_) - chol_l_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(x_.rows()) * std::log(2.0 * std::numbers::pi);
  const auto inv = inverse_lengths(hyper_);
  x_scaled_ = x_.array().rowwise() * inv.array();
  x_sq_norm_ = x_scaled_.rowwise().squaredNorm();
}

void ScalarGp::predict(const GpInputBatch& q, Eigen::Ref<Eigen::VectorXd> mean,
                       Eigen::Ref<Eigen::VectorXd> variance) const {
  const auto inv = inverse_lengths(hyper_);
  const Eigen::MatrixXd q_scaled = q.array().rowwise() * inv.array();
  const Eigen::VectorXd q_sq = q_scaled.rowwise().squaredNorm();
  const double sf2 = hyper_.signal_var();

  Eigen::MatrixXd ks = -2.0 * q_scaled * x_scaled_.transpose();
  ks.colwise() += q_sq;
  ks.rowwise() += x_sq_norm_.transpose();
  // Terms below 1e-16 sf2 are dropped; they are round-off sized and would
  // otherwise feed subnormals into the solve.
  ks = ks.unaryExpr([sf2](double d2) { return d2 > 73.7 ? 0.0 : sf2 * std::exp(-0.5 * std::max(d2, 0.0)); });

  mean = ks * alpha_;
  const Eigen::MatrixXd v = chol_l_.triangularView<Eigen::Lower>().solve(ks.transpose());
  variance = (sf2 - v.colwise().squaredNorm().array()).max(0.0).transpose();
}

GpPrediction GpModel::predict(const GpInput& x) const {
  GpInputBatch q(1, kGpInputDim);
  q.row(0) = x.transpose();
  Eigen::MatrixX3d mean, var;
  predict(q, mean, var);
  return {mean.row(0).transpose(), var.row(0).transpose()};
}

void GpModel::predict(const GpInputBatch& q, Eigen::MatrixX3d& mean, Eigen::MatrixX3d& variance) const {
  mean.resize(q.rows(), 3);
  variance.resize(q.rows(), 3);
  for (int i = 0; i < kGpOutputDim; ++i) outputs_[i].predict(q, mean.col(i), variance.col(i));
}

Vec3 GpModel::sample(const GpInput& x, RandomStream& rng) const {
  const GpPrediction p = predict(x);
  Vec3 out;
  for (int i = 0; i < kGpOutputDim; ++i) out[i] = p.mean[i] + std::sqrt(p.variance[i]) * standard_normal(rng);
  return out;
}

double GpModel::log_marginal_likelihood() const {
  double sum = 0.0;
  for (const auto& o : outputs_) sum += o.log_marginal_likelihood();
  return sum;
}

SeHyper default_hyper(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  SeHyper h;
  const double second_moment = y.size() > 0 ? y.squaredNorm() / static_cast<double>(y.size()) : 1.0;
  const double sf2 = std::max(second_moment, 1e-8);
  h.log_signal_var = std::log(sf2);
  h.log_noise_var = std::log(std::max(0.1 * sf2, 1e-8));
  for (int d = 0; d < kGpInputDim; ++d) {
    const Eigen::VectorXd col = x.col(d);
    const double mean = col.mean();
    const double sd = x.rows() > 1 ? std::sqrt((col.array() - mean).square().sum() / (x.rows() - 1)) : 0.0;
    h.log_length[d] = std::log(sd > 1e-6 ? sd : 1.0);
  }
  return h;
}

GpModel fit(const GpDataset& data, const GpFitOptions& options, GpFitReport* report) {
  if (data.empty()) throw Error(ErrorCode::kInsufficientData, "fit: empty dataset");
  if (data.inputs.size() != data.outputs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "fit: inputs and outputs differ in length");
  }
  const auto idx = subsample_indices(data.size(), std::max<std::size_t>(options.max_points, 1), options.seed);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd x(n, kGpInputDim);
  Eigen::MatrixXd y(n, kGpOutputDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = data.inputs[idx[i]].transpose();
    y.row(i) = data.outputs[idx[i]].transpose();
  }

  std::array<ScalarGp, kGpOutputDim> outputs;
  GpFitReport rep;
  rep.points_used = idx.size();
  for (int o = 0; o < kGpOutputDim; ++o) {
    const Eigen::VectorXd yo = y.col(o);
    const SeHyper first = options.init ? (*options.init)[o] : default_hyper(x, yo);
    RandomStream rng = derive_stream(options.seed, {0x9f17ULL, static_cast<std::uint64_t>(o)});

    SeHyper best = first;
    auto best_lml = log_marginal_likelihood(x, yo, first);
    rep.initial_lml[o] = best_lml.value_or(-std::numeric_limits<double>::infinity());
    for (int r = 0; r < std::max(options.restarts, 1); ++r) {
      SeHyper start = first;
      if (r > 0) {
        start.log_signal_var += 0.7 * standard_normal(rng);
        for (double& l : start.log_length) l += 0.7 * standard_normal(rng);
        start.log_noise_var += 0.7 * standard_normal(rng);
      }
      if (!log_marginal_likelihood(x, yo, start)) continue;
      const SeHyper candidate = optimize(x, yo, start, options.iterations);
      const auto lml = log_marginal_likelihood(x, yo, candidate);
      if (lml && (!best_lml || *lml > *best_lml)) {
        best = candidate;
        best_lml = lml;
      }
    }
    outputs[o] = ScalarGp(x, yo, best);
    rep.final_lml[o] = outputs[o].log_marginal_likelihood();
  }
  if (report != nullptr) *report = rep;
  return GpModel(std::move(outputs));
}

GpModel zero_residual_model() {
  SeHyper h;
  h.log_signal_var = -800.0;  // exp underflows to exactly 0: zero mean, zero variance
  h.log_length.fill(0.0);
  h.log_noise_var = 0.0;
  std::array<ScalarGp, kGpOutputDim> outputs;
  for (auto& o : outputs) o = ScalarGp(Eigen::MatrixXd::Zero(1, kGpInputDim), Eigen::VectorXd::Zero(1), h);
  return GpModel(std::move(outputs));
}

const GpModel& GpRegistry::at(TerrainClass c) const {
  auto it = models_.find(c);
  if (it == models_.end()) {
    throw Error(ErrorCode::kRegistry, "no GP model for terrain '" + std::string(terrain_name(c)) + "'");
  }
  return it->second;
}

std::string gp_model_to_json(const GpModel& model, TerrainClass label) {
  using nlohmann::json;
  json j;
  j["format"] = "terranav.gp";
  j["version"] = 1;
  j["label"] = std::string(terrain_name(label));
  j["input_dim"] = kGpInputDim;
  j["features"] = {"vx", "vy", "wz", "roll", "pitch", "steer", "accel"};
  const Eigen::MatrixXd& x = model.output(0).inputs();
  json inputs = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> row(kGpInputDim);
    for (int d = 0; d < kGpInputDim; ++d) row[d] = x(i, d);
    inputs.push_back(std::move(row));
  }
  j["inputs"] = std::move(inputs);
  json outs = json::array();
  for (int o = 0; o < kGpOutputDim; ++o) {
    const ScalarGp& g = model.output(o);
    const Eigen::VectorXd& y = g.targets();
    outs.push_back({{"name", std::array<const char*, 3>{"e_vx", "e_vy", "e_wz"}[o]},
                    {"log_signal_var", g.hyper().log_signal_var},
                    {"log_length", g.hyper().log_length},
                    {"log_noise_var", g.hyper().log_noise_var},
                    {"log_marginal_likelihood", g.log_marginal_likelihood()},
                    {"targets", std::vector<double>(y.data(), y.data() + y.size())}});
  }
  j["outputs"] = std::move(outs);
  return j.dump();
}

GpModel gp_model_from_json(const std::string& text, TerrainClass* label) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "terranav.gp" || j.at("version") != 1) {
      throw Error(ErrorCode::kConfig, "not a terranav GP model file");
    }
    if (label != nullptr) {
      const auto c = terrain_from_name(j.at("label").get<std::string>());
      if (!c) throw Error(ErrorCode::kConfig, "unknown terrain label in GP model file");
      *label = *c;
    }
    const auto& inputs = j.at("inputs");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(inputs.size()), kGpInputDim);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      for (int d = 0; d < kGpInputDim; ++d) x(static_cast<Eigen::Index>(i), d) = inputs[i].at(d).get<double>();
    }
    std::array<ScalarGp, kGpOutputDim> outputs;
    const auto& outs = j.at("outputs");
    if (outs.size() != kGpOutputDim) throw Error(ErrorCode::kConfig, "GP model file must hold 3 outputs");
    for (int o = 0; o < kGpOutputDim; ++o) {
      const auto& jo = outs[o];
      SeHyper h;
      h.log_signal_var = jo.at("log_signal_var").get<double>();
      h.log_length = jo.at("log_length").get<std::array<double, kGpInputDim>>();
      h.log_noise_var = jo.at("log_noise_var").get<double>();
      const auto targets = jo.at("targets").get<std::vector<double>>();
      outputs[o] = ScalarGp(x, Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size())), h);
    }
    return GpModel(std::move(outputs));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed GP model file: ") + e.what());
  }
}

void save_gp_model(const std::string& path, const GpModel& model, TerrainClass label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << gp_model_to_json(model, label) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

GpModel load_gp_model(const std::string& path, TerrainClass* label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return gp_model_from_json(ss.str(), label);
}

}  // namespace terranav
