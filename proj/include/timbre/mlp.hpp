// Copyright 2026 The Timbre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "timbre/dataset.hpp"

namespace timbre {

struct FeatureVector;

inline constexpr int kInputs = 50;
inline constexpr int kDefaultHidden = 30;
inline constexpr int kOutputs = kNumClasses;

/// Fully connected layer. Row-major `outputs x (inputs + 1)`; column 0 holds
/// the threshold weight, which sees a constant input of -1.
struct Layer {
  int outputs = 0;
  int inputs = 0;
  std::vector<double> weights;

  Layer() = default;
  Layer(int outputs, int inputs)
      : outputs(outputs),
        inputs(inputs),
        weights(static_cast<std::size_t>(outputs) * (inputs + 1), 0.0) {}

  std::size_t stride() const { return static_cast<std::size_t>(inputs) + 1; }
  double& threshold(int o) { return weights[o * stride()]; }
  double& at(int o, int i) { return weights[o * stride() + 1 + i]; }
  double at(int o, int i) const { return weights[o * stride() + 1 + i]; }

  bool operator==(const Layer&) const = default;
};

/// Constants of the resilient-propagation update.
struct RpropParams {
  double delta0 = 0.07;
  double delta_min = 1e-6;
  double delta_max = 50.0;
  double eta_plus = 1.2;
  double eta_minus = 0.5;
};

struct TrainConfig {
  int max_epochs = 500;
  int max_fail = 150;
  int hidden = kDefaultHidden;
  RpropParams rprop;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on inconsistent constants.
  void validate() const;
};

/// 50 -> hidden (tanh) -> 8 (softmax) perceptron with per-weight Rprop state.
struct MlpModel {
  Layer hidden;
  Layer output;
  std::vector<double> step_hidden;
  std::vector<double> step_output;
  std::vector<std::int8_t> prev_sign_hidden;
  std::vector<std::int8_t> prev_sign_output;

  /// All weights zero, steps at delta0, no gradient history.
  static MlpModel zeros(int hidden_units, double delta0);
  /// Weights uniform in [-0.5, 0.5] drawn from `seed`.
  static MlpModel random(int hidden_units, double delta0, std::uint64_t seed);

  bool operator==(const MlpModel&) const = default;
};

struct Gradients {
  std::vector<double> hidden;
  std::vector<double> output;
};

/// Inputs flattened row-major (`size() x kInputs`) with 0-based class targets.
struct LabeledSet {
  std::vector<double> inputs;
  std::vector<int> targets;

  std::size_t size() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(inputs).subspan(i * kInputs, kInputs);
  }
  void add(std::span<const double> x, int target);
};

LabeledSet to_labeled_set(std::span<const FeatureVector> features);

/// Class probabilities for one input vector.
std::array<double, kOutputs> forward(const MlpModel& model, std::span<const double> x);

/// Mean cross-entropy over the set; throws EmptyBatch.
double loss(const MlpModel& model, const LabeledSet& batch);

/// Mean cross-entropy and its exact full-batch gradient; throws EmptyBatch.
std::pair<double, Gradients> loss_and_gradient(const MlpModel& model,
                                               const LabeledSet& batch);

/// Sign-driven update of one parameter block (iRprop-). Per element:
///   same gradient sign as last time: step *= eta_plus (capped), move;
///   sign flip: step *= eta_minus (floored), no move, forget the sign;
///   otherwise: move with the current step.
/// A move is w -= sign(grad) * step. A zero gradient leaves w and step alone.
void rprop_update(std::span<double> weights, std::span<double> steps,
                  std::span<std::int8_t> prev_sign, std::span<const double> grads,
                  const RpropParams& params);

/// Applies rprop_update to both layers; throws ShapeMismatch.
MlpModel rprop_step(MlpModel model, const Gradients& grads, const RpropParams& params);

struct TrainOutcome {
  MlpModel model;  // weights from the best validation epoch
  int best_epoch = 0;
  int epochs_run = 0;
  /// Index e is the state after e updates; index 0 is the initial model.
  std::vector<double> train_error_curve;
  std::vector<double> validation_error_curve;
};

/// Full-batch Rprop with early stopping on validation cross-entropy.
TrainOutcome train_early_stopping(const LabeledSet& train, const LabeledSet& validation,
                                  const TrainConfig& cfg);

struct ConfusionMatrix {
  /// counts[true][predicted], 0-based classes.
  std::array<std::array<long, kOutputs>, kOutputs> counts{};

  long total() const;
  long trace() const;
  long row_total(int true_class) const;
  double accuracy() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> scores);
int predict(const MlpModel& model, std::span<const double> x);

/// Throws EmptySet.
ConfusionMatrix evaluate(const MlpModel& model, const LabeledSet& test);

std::string model_to_json(const MlpModel& model, const TrainConfig& cfg);
std::pair<MlpModel, TrainConfig> model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const MlpModel& model,
                const TrainConfig& cfg);
std::pair<MlpModel, TrainConfig> load_model(const std::filesystem::path& path);

}  // namespace timbre
