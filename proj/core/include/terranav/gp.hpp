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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "terranav/dynamics.hpp"
#include "terranav/random.hpp"

namespace terranav {

inline constexpr int kGpInputDim = 7;
inline constexpr int kGpOutputDim = 3;

// (vx, vy, wz, roll, pitch, steer, accel)
using GpInput = Eigen::Matrix<double, kGpInputDim, 1>;
using GpInputBatch = Eigen::Matrix<double, Eigen::Dynamic, kGpInputDim, Eigen::RowMajor>;

GpInput gp_features(const VehicleState& s, const Attitude& att, const ControlInput& u);

// Inputs x_gp(k-1) paired with next-step velocity errors (e_vx, e_vy, e_w)(k).
struct GpDataset {
  std::vector<GpInput> inputs;
  std::vector<Vec3> outputs;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  void append(const GpInput& x, const Vec3& y) {
    inputs.push_back(x);
    outputs.push_back(y);
  }
  void append(const GpDataset& other);
};

struct LogEntry {
  double t = 0.0;
  VehicleState state;
  ControlInput input;
  Attitude attitude;
};

/// Labels a uniformly sampled drive log with one-step velocity residuals of
/// the nominal model. Throws kIngestion for fewer than two entries or a
/// non-uniform time base.
GpDataset residual_labels(std::span<const LogEntry> log, const VehicleParams& p);

// Log-space hyperparameters of one squared-exponential ARD kernel plus
// Gaussian observation noise: (log s^2, log l_1..l_7, log s_n^2).
struct SeHyper {
  static constexpr int kSize = kGpInputDim + 2;
  using Vector = Eigen::Matrix<double, kSize, 1>;

  double log_signal_var = 0.0;
  std::array<double, kGpInputDim> log_length{};
  double log_noise_var = -4.0;

  Vector to_vector() const;
  static SeHyper from_vector(const Vector& v);
  double signal_var() const;
  double noise_var() const;
};

double se_kernel(const GpInput& a, const GpInput& b, const SeHyper& h);

/// Exact log marginal likelihood of y under the zero-mean GP with
/// hyperparameters h. When `grad` is non-null it receives the gradient with
/// respect to SeHyper::to_vector(). Returns nullopt when K + s_n^2 I is not
/// positive definite even after the maximum jitter.
std::optional<double> log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              const SeHyper& h, SeHyper::Vector* grad = nullptr);

struct GpPrediction {
  Vec3 mean = Vec3::Zero();
  Vec3 variance = Vec3::Zero();
};

// One scalar output: retained inputs, Cholesky factor of K + s_n^2 I and the
// weight vector (K + s_n^2 I)^-1 y.
class ScalarGp {
 public:
  ScalarGp() = default;
  // Throws kConditioning if the kernel matrix cannot be factorized.
  ScalarGp(Eigen::MatrixXd x, Eigen::VectorXd y, const SeHyper& h);

  const SeHyper& hyper() const { return hyper_; }
  const Eigen::MatrixXd& inputs() const { return x_; }
  const Eigen::VectorXd& targets() const { return y_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }

  // Posterior mean and latent variance (clamped at 0) for each row of q.
  void predict(const GpInputBatch& q, Eigen::Ref<Eigen::VectorXd> mean,
               Eigen::Ref<Eigen::VectorXd> variance) const;

 private:
  SeHyper hyper_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_scaled_;  // inputs divided by length-scales
  Eigen::VectorXd x_sq_norm_;
  Eigen::MatrixXd chol_l_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

// Three independent scalar GPs sharing the same inputs.
class GpModel {
 public:
  GpModel() = default;
  explicit GpModel(std::array<ScalarGp, kGpOutputDim> outputs) : outputs_(std::move(outputs)) {}

  const ScalarGp& output(int i) const { return outputs_[static_cast<std::size_t>(i)]; }
  std::size_t training_size() const { return static_cast<std::size_t>(outputs_[0].inputs().rows()); }

  GpPrediction predict(const GpInput& x) const;
  // Row i of mean/variance is the prediction for row i of q.
  void predict(const GpInputBatch& q, Eigen::MatrixX3d& mean, Eigen::MatrixX3d& variance) const;

  // mean + sqrt(variance) * z with z ~ N(0, I) drawn from rng.
  Vec3 sample(const GpInput& x, RandomStream& rng) const;

  // Sum of per-output log marginal likelihoods.
  double log_marginal_likelihood() const;

 private:
  std::array<ScalarGp, kGpOutputDim> outputs_;
};

struct GpFitOptions {
  int iterations = 60;
  int restarts = 3;
  std::size_t max_points = 1000;
  std::uint64_t seed = 0;
  // First start; the remaining starts perturb it. Data-driven when unset.
  std::optional<std::array<SeHyper, kGpOutputDim>> init;
};

struct GpFitReport {
  std::array<double, kGpOutputDim> initial_lml{};
  std::array<double, kGpOutputDim> final_lml{};
  std::size_t points_used = 0;
};

// Data-driven starting point for one output column.
SeHyper default_hyper(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Maximizes the exact log marginal likelihood per output in log-parameter
/// space (L-BFGS, multi-start) and keeps the best start. Datasets above
/// max_points are uniformly subsampled without replacement.
GpModel fit(const GpDataset& data, const GpFitOptions& options, GpFitReport* report = nullptr);

// Model whose predictions are zero mean with (numerically) zero variance.
GpModel zero_residual_model();

class GpRegistry {
 public:
  void set(TerrainClass c, GpModel model) { models_[c] = std::move(model); }
  bool contains(TerrainClass c) const { return models_.count(c) != 0; }
  // Throws kRegistry for an unknown terrain class.
  const GpModel& at(TerrainClass c) const;
  const std::map<TerrainClass, GpModel>& models() const { return models_; }
  std::size_t size() const { return models_.size(); }

 private:
  std::map<TerrainClass, GpModel> models_;
};

// JSON model files; round trips reproduce predictions exactly.
std::string gp_model_to_json(const GpModel& model, TerrainClass label);
GpModel gp_model_from_json(const std::string& text, TerrainClass* label = nullptr);
void save_gp_model(const std::string& path, const GpModel& model, TerrainClass label);
GpModel load_gp_model(const std::string& path, TerrainClass* label = nullptr);

}  // namespace terranav
