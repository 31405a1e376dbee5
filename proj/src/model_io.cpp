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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "timbre/error.hpp"
#include "timbre/mlp.hpp"

namespace timbre {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "timbre-mlp";
constexpr int kVersion = 1;

json layer_json(const Layer& layer) {
  return {{"outputs", layer.outputs}, {"inputs", layer.inputs}, {"weights", layer.weights}};
}

Layer layer_from(const json& j) {
  Layer layer(j.at("outputs").get<int>(), j.at("inputs").get<int>());
  auto weights = j.at("weights").get<std::vector<double>>();
  if (weights.size() != layer.weights.size())
    throw Error(ErrorKind::ShapeMismatch, "model file: weight count does not match shape");
  layer.weights = std::move(weights);
  return layer;
}

}  // namespace

std::string model_to_json(const MlpModel& model, const TrainConfig& cfg) {
  const auto& r = cfg.rprop;
  json j = {
      {"format", kFormat},
      {"version", kVersion},
      {"architecture",
       {{"inputs", kInputs},
        {"hidden", model.hidden.outputs},
        {"outputs", kOutputs},
        {"hidden_activation", "tanh"},
        {"output_activation", "softmax"},
        {"loss", "cross_entropy"},
        {"threshold_input", -1.0}}},
      {"hidden", layer_json(model.hidden)},
      {"output", layer_json(model.output)},
      {"step_hidden", model.step_hidden},
      {"step_output", model.step_output},
      {"prev_sign_hidden", model.prev_sign_hidden},
      {"prev_sign_output", model.prev_sign_output},
      {"train_config",
       {{"max_epochs", cfg.max_epochs},
        {"max_fail", cfg.max_fail},
        {"hidden", cfg.hidden},
        {"seed", cfg.seed},
        {"delta0", r.delta0},
        {"delta_min", r.delta_min},
        {"delta_max", r.delta_max},
        {"eta_plus", r.eta_plus},
        {"eta_minus", r.eta_minus}}},
  };
  return j.dump(1);
}

std::pair<MlpModel, TrainConfig> model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != kFormat)
      throw Error(ErrorKind::UnsupportedFormat, "not a timbre model file");
    if (j.at("version").get<int>() != kVersion)
      throw Error(ErrorKind::UnsupportedFormat, "unsupported model file version");

    MlpModel m;
    m.hidden = layer_from(j.at("hidden"));
    m.output = layer_from(j.at("output"));
    if (m.hidden.inputs != kInputs || m.output.outputs != kOutputs ||
        m.output.inputs != m.hidden.outputs)
      throw Error(ErrorKind::ShapeMismatch, "model file: layer shapes are inconsistent");
    m.step_hidden = j.at("step_hidden").get<std::vector<double>>();
    m.step_output = j.at("step_output").get<std::vector<double>>();
    m.prev_sign_hidden = j.at("prev_sign_hidden").get<std::vector<std::int8_t>>();
    m.prev_sign_output = j.at("prev_sign_output").get<std::vector<std::int8_t>>();
    if (m.step_hidden.size() != m.hidden.weights.size() ||
        m.step_output.size() != m.output.weights.size() ||
        m.prev_sign_hidden.size() != m.hidden.weights.size() ||
        m.prev_sign_output.size() != m.output.weights.size())
      throw Error(ErrorKind::ShapeMismatch, "model file: Rprop state does not match weights");

    const auto& t = j.at("train_config");
    TrainConfig cfg;
    cfg.max_epochs = t.at("max_epochs").get<int>();
    cfg.max_fail = t.at("max_fail").get<int>();
    cfg.hidden = t.at("hidden").get<int>();
    cfg.seed = t.at("seed").get<std::uint64_t>();
    cfg.rprop.delta0 = t.at("delta0").get<double>();
    cfg.rprop.delta_min = t.at("delta_min").get<double>();
    cfg.rprop.delta_max = t.at("delta_max").get<double>();
    cfg.rprop.eta_plus = t.at("eta_plus").get<double>();
    cfg.rprop.eta_minus = t.at("eta_minus").get<double>();
    return {std::move(m), cfg};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const MlpModel& model,
                const TrainConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out << model_to_json(model, cfg) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::pair<MlpModel, TrainConfig> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace timbre
