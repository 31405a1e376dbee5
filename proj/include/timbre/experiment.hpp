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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "timbre/dataset.hpp"
#include "timbre/error.hpp"
#include "timbre/features.hpp"
#include "timbre/mlp.hpp"

namespace timbre {

struct ManifestSource {
  std::filesystem::path path;
};

struct SyntheticSource {
  int per_class = 40;
};

using DataSource = std::variant<ManifestSource, SyntheticSource>;

struct ExperimentSpec {
  Variant variant = Variant::Base;
  int runs = 10;
  std::uint64_t seed = 1;
  DataSource source = SyntheticSource{};
  TrainConfig train;  // seed is overridden per run
};

struct RunResult {
  int run = 0;  // 1-based
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  ConfusionMatrix confusion;
  std::vector<double> train_error_curve;
  std::vector<double> validation_error_curve;
};

struct ExperimentReport {
  Variant variant = Variant::Base;
  std::uint64_t base_seed = 0;
  std::size_t clips_total = 0;
  std::size_t clips_used = 0;
  /// Clips left out because feature extraction failed, by error class.
  std::map<ErrorKind, std::size_t> skipped;
  std::vector<RunResult> per_run;
  double mean_accuracy = 0.0;
  ConfusionMatrix pooled_confusion;
};

/// Seed for 1-based run index `run`.
constexpr std::uint64_t run_seed(std::uint64_t base, int run) {
  return base + static_cast<std::uint64_t>(run);
}

/// Reads every manifest clip, or synthesizes the stand-in corpus from `seed`.
/// Load failures surface as DataSourceError.
std::vector<AudioClip> load_corpus(const DataSource& source, std::uint64_t seed);

struct FeatureExtraction {
  std::vector<FeatureVector> features;
  std::map<ErrorKind, std::size_t> skipped;
};

/// Clips whose segment cannot be extracted are skipped and counted.
FeatureExtraction extract_corpus_features(const std::vector<AudioClip>& clips,
                                          Variant variant);

struct SplitSets {
  LabeledSet train;
  LabeledSet validation;
  LabeledSet test;
};

/// Stratified 60/20/20 split of feature vectors by source id; throws
/// DataSourceError on duplicate ids.
SplitSets split_features(const std::vector<FeatureVector>& features, std::uint64_t seed);

/// One split/train/evaluate cycle.
RunResult run_once(const std::vector<FeatureVector>& features, int run,
                   std::uint64_t base_seed, const TrainConfig& train);

ExperimentReport run_experiment_on(const std::vector<AudioClip>& clips, Variant variant,
                                   int runs, std::uint64_t seed, const TrainConfig& train);
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// One report per variant over the same corpus and seed schedule.
std::vector<ExperimentReport> run_all(const ExperimentSpec& spec);

enum class ReportFormat { Text, Csv };

std::string render_text(const ExperimentReport& report);
std::string render_csv(const ExperimentReport& report);
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& out);

/// Pooled confusion matrix recovered from render_csv output.
ConfusionMatrix parse_pooled_confusion_csv(std::string_view csv);

/// run,epoch,train_loss,validation_loss
std::string render_curves_csv(const ExperimentReport& report);

/// Accuracy table with one row per variant, in Base .. Following900Hz order.
std::string render_summary(const std::vector<ExperimentReport>& reports);

/// Published mean accuracy for each variant on the full orchestral corpus.
double reference_accuracy(Variant v);

}  // namespace timbre
