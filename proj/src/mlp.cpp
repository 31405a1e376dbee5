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

#include "timbre/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "timbre/error.hpp"
#include "timbre/features.hpp"
#include "timbre/rng.hpp"

namespace timbre {
namespace {

constexpr double kBiasInput = -1.0;

std::int8_t sign_of(double g) { return static_cast<std::int8_t>((g > 0.0) - (g < 0.0)); }

void require_batch(const LabeledSet& batch, const char* op) {
  if (batch.size() == 0) throw Error(ErrorKind::EmptyBatch, std::string(op) + ": empty batch");
}

// Pre-activations for one layer: s_o = sum_i w_oi x_i - theta_o.
void affine(const Layer& layer, std::span<const double> x, std::span<double> out) {
  const std::size_t stride = layer.stride();
  for (int o = 0; o < layer.outputs; ++o) {
    const double* w = layer.weights.data() + o * stride;
    double s = kBiasInput * w[0];
    for (int i = 0; i < layer.inputs; ++i) s += w[1 + i] * x[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(o)] = s;
  }
}

// Returns log-sum-exp and writes softmax probabilities.
double softmax(std::span<const double> scores, std::span<double> probs) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    probs[k] = std::exp(scores[k] - peak);
    sum += probs[k];
  }
  for (auto& p : probs) p /= sum;
  return peak + std::log(sum);
}

struct Workspace {
  std::vector<double> hidden_act;
  std::array<double, kOutputs> scores{};
  std::array<double, kOutputs> probs{};

  explicit Workspace(int hidden) : hidden_act(static_cast<std::size_t>(hidden)) {}
};

// Runs the network on x; returns the sample's cross-entropy against target.
double run(const MlpModel& m, std::span<const double> x, int target, Workspace& ws) {
  affine(m.hidden, x, ws.hidden_act);
  for (auto& h : ws.hidden_act) h = std::tanh(h);
  affine(m.output, ws.hidden_act, ws.scores);
  const double lse = softmax(ws.scores, ws.probs);
  return target >= 0 ? lse - ws.scores[static_cast<std::size_t>(target)] : 0.0;
}

}  // namespace

void TrainConfig::validate() const {
  const auto& r = rprop;
  if (max_epochs < 0 || max_fail < 1 || hidden < 1)
    throw std::invalid_argument("TrainConfig: epochs, max_fail and hidden must be positive");
  if (!(0.0 < r.eta_minus && r.eta_minus < 1.0 && 1.0 < r.eta_plus))
    throw std::invalid_argument("TrainConfig: need 0 < eta_minus < 1 < eta_plus");
  if (!(0.0 < r.delta_min && r.delta_min <= r.delta0 && r.delta0 <= r.delta_max))
    throw std::invalid_argument("TrainConfig: need 0 < delta_min <= delta0 <= delta_max");
}

MlpModel MlpModel::zeros(int hidden_units, double delta0) {
  MlpModel m;
  m.hidden = Layer(hidden_units, kInputs);
  m.output = Layer(kOutputs, hidden_units);
  m.step_hidden.assign(m.hidden.weights.size(), delta0);
  m.step_output.assign(m.output.weights.size(), delta0);
  m.prev_sign_hidden.assign(m.hidden.weights.size(), 0);
  m.prev_sign_output.assign(m.output.weights.size(), 0);
  return m;
}

MlpModel MlpModel::random(int hidden_units, double delta0, std::uint64_t seed) {
  MlpModel m = zeros(hidden_units, delta0);
  Rng rng(seed);
  for (auto& w : m.hidden.weights) w = rng.uniform(-0.5, 0.5);
  for (auto& w : m.output.weights) w = rng.uniform(-0.5, 0.5);
  return m;
}

void LabeledSet::add(std::span<const double> x, int target) {
  if (x.size() != static_cast<std::size_t>(kInputs))
    throw Error(ErrorKind::ShapeMismatch, "input vector must have 50 values");
  if (target < 0 || target >= kOutputs)
    throw Error(ErrorKind::UnknownLabel, "target class out of range");
  inputs.insert(inputs.end(), x.begin(), x.end());
  targets.push_back(target);
}

LabeledSet to_labeled_set(std::span<const FeatureVector> features) {
  LabeledSet set;
  set.inputs.reserve(features.size() * kInputs);
  set.targets.reserve(features.size());
  for (const auto& fv : features) set.add(fv.values, slot_of(fv.label));
  return set;
}

std::array<double, kOutputs> forward(const MlpModel& model, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(kInputs))
    throw Error(ErrorKind::ShapeMismatch, "forward: input must have 50 values");
  Workspace ws(model.hidden.outputs);
  run(model, x, -1, ws);
  return ws.probs;
}

double loss(const MlpModel& model, const LabeledSet& batch) {
  require_batch(batch, "loss");
  Workspace ws(model.hidden.outputs);
  double total = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n)
    total += run(model, batch.row(n), batch.targets[n], ws);
  return total / static_cast<double>(batch.size());
}

std::pair<double, Gradients> loss_and_gradient(const MlpModel& model,
                                               const LabeledSet& batch) {
  require_batch(batch, "loss_and_gradient");
  const int hidden = model.hidden.outputs;
  const std::size_t hs = model.hidden.stride();
  const std::size_t os = model.output.stride();
  Gradients g;
  g.hidden.assign(model.hidden.weights.size(), 0.0);
  g.output.assign(model.output.weights.size(), 0.0);

  Workspace ws(hidden);
  std::vector<double> delta_hidden(static_cast<std::size_t>(hidden));
  double total = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const auto x = batch.row(n);
    const int target = batch.targets[n];
    total += run(model, x, target, ws);

    // d(loss)/d(score_k) = p_k - [k == target] for softmax + cross-entropy.
    std::array<double, kOutputs> delta_out = ws.probs;
    delta_out[static_cast<std::size_t>(target)] -= 1.0;

    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (int k = 0; k < kOutputs; ++k) {
      const double d = delta_out[static_cast<std::size_t>(k)];
      double* gk = g.output.data() + k * os;
      const double* wk = model.output.weights.data() + k * os;
      gk[0] += kBiasInput * d;
      for (int j = 0; j < hidden; ++j) {
        gk[1 + j] += d * ws.hidden_act[static_cast<std::size_t>(j)];
        delta_hidden[static_cast<std::size_t>(j)] += d * wk[1 + j];
      }
    }
    for (int j = 0; j < hidden; ++j) {
      const double h = ws.hidden_act[static_cast<std::size_t>(j)];
      const double d = delta_hidden[static_cast<std::size_t>(j)] * (1.0 - h * h);
      double* gj = g.hidden.data() + j * hs;
      gj[0] += kBiasInput * d;
      for (int i = 0; i < kInputs; ++i) gj[1 + i] += d * x[static_cast<std::size_t>(i)];
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : g.hidden) v *= inv;
  for (auto& v : g.output) v *= inv;
  return {total * inv, std::move(g)};
}

void rprop_update(std::span<double> weights, std::span<double> steps,
                  std::span<std::int8_t> prev_sign, std::span<const double> grads,
                  const RpropParams& params) {
  if (steps.size() != weights.size() || prev_sign.size() != weights.size() ||
      grads.size() != weights.size())
    throw Error(ErrorKind::ShapeMismatch, "rprop_update: parameter blocks differ in size");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::int8_t s = sign_of(grads[i]);
    const int agreement = s * prev_sign[i];
    if (agreement > 0) {
      steps[i] = std::min(steps[i] * params.eta_plus, params.delta_max);
      weights[i] -= s * steps[i];
      prev_sign[i] = s;
    } else if (agreement < 0) {
      steps[i] = std::max(steps[i] * params.eta_minus, params.delta_min);
      prev_sign[i] = 0;
    } else {
      weights[i] -= s * steps[i];
      prev_sign[i] = s;
    }
  }
}

MlpModel rprop_step(MlpModel model, const Gradients& grads, const RpropParams& params) {
  if (grads.hidden.size() != model.hidden.weights.size() ||
      grads.output.size() != model.output.weights.size())
    throw Error(ErrorKind::ShapeMismatch, "rprop_step: gradient shapes do not match model");
  rprop_update(model.hidden.weights, model.step_hidden, model.prev_sign_hidden,
               grads.hidden, params);
  rprop_update(model.output.weights, model.step_output, model.prev_sign_output,
               grads.output, params);
  return model;
}

TrainOutcome train_early_stopping(const LabeledSet& train, const LabeledSet& validation,
                                  const TrainConfig& cfg) {
  cfg.validate();
  require_batch(train, "train_early_stopping (train)");
  require_batch(validation, "train_early_stopping (validation)");

  TrainOutcome out;
  MlpModel model = MlpModel::random(cfg.hidden, cfg.rprop.delta0, cfg.seed);
  auto [train_loss, grads] = loss_and_gradient(model, train);
  double best_val = loss(model, validation);
  out.train_error_curve.push_back(train_loss);
  out.validation_error_curve.push_back(best_val);
  out.model = model;

  int epoch = 0;
  while (epoch < cfg.max_epochs && epoch - out.best_epoch < cfg.max_fail) {
    ++epoch;
    rprop_update(model.hidden.weights, model.step_hidden, model.prev_sign_hidden,
                 grads.hidden, cfg.rprop);
    rprop_update(model.output.weights, model.step_output, model.prev_sign_output,
                 grads.output, cfg.rprop);
    std::tie(train_loss, grads) = loss_and_gradient(model, train);
    const double val = loss(model, validation);
    out.train_error_curve.push_back(train_loss);
    out.validation_error_curve.push_back(val);
    if (val < best_val) {
      best_val = val;
      out.best_epoch = epoch;
      out.model = model;
    }
  }
  out.epochs_run = epoch;
  return out;
}

long ConfusionMatrix::total() const {
  long sum = 0;
  for (const auto& row : counts)
    for (const long c : row) sum += c;
  return sum;
}

long ConfusionMatrix::trace() const {
  long sum = 0;
  for (int k = 0; k < kOutputs; ++k) sum += counts[k][k];
  return sum;
}

long ConfusionMatrix::row_total(int true_class) const {
  long sum = 0;
  for (const long c : counts[static_cast<std::size_t>(true_class)]) sum += c;
  return sum;
}

double ConfusionMatrix::accuracy() const {
  const long n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int r = 0; r < kOutputs; ++r)
    for (int c = 0; c < kOutputs; ++c) counts[r][c] += other.counts[r][c];
  return *this;
}

int argmax(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

int predict(const MlpModel& model, std::span<const double> x) {
  return argmax(forward(model, x));
}

ConfusionMatrix evaluate(const MlpModel& model, const LabeledSet& test) {
  if (test.size() == 0) throw Error(ErrorKind::EmptySet, "evaluate: empty test set");
  ConfusionMatrix cm;
  Workspace ws(model.hidden.outputs);
  for (std::size_t n = 0; n < test.size(); ++n) {
    run(model, test.row(n), -1, ws);
    ++cm.counts[static_cast<std::size_t>(test.targets[n])]
               [static_cast<std::size_t>(argmax(ws.probs))];
  }
  return cm;
}

}  // namespace timbre
