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

#include "timbre/experiment.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace timbre {
namespace {

constexpr std::array<double, 5> kReferenceAccuracy = {0.935, 0.802, 0.732, 0.642, 0.906};

}  // namespace

double reference_accuracy(Variant v) {
  return kReferenceAccuracy[static_cast<std::size_t>(v)];
}

std::vector<AudioClip> load_corpus(const DataSource& source, std::uint64_t seed) {
  if (const auto* synth = std::get_if<SyntheticSource>(&source)) {
    if (synth->per_class < 1)
      throw Error(ErrorKind::DataSourceError, "synthetic corpus needs per_class >= 1");
    spdlog::info("synthesizing {} clips per class (seed {})", synth->per_class, seed);
    return generate_synthetic_corpus(seed, synth->per_class);
  }

  const auto& path = std::get<ManifestSource>(source).path;
  DatasetManifest manifest;
  try {
    manifest = load_manifest(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::DataSourceError, std::string(to_string(e.kind())) + ": " + e.what());
  }
  std::vector<AudioClip> clips;
  clips.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    try {
      clips.push_back(load_clip(entry, manifest.base_dir));
    } catch (const Error& e) {
      throw Error(ErrorKind::DataSourceError,
                  std::string(to_string(e.kind())) + ": " + e.what());
    }
  }
  spdlog::info("loaded {} clips from {}", clips.size(), path.string());
  return clips;
}

FeatureExtraction extract_corpus_features(const std::vector<AudioClip>& clips,
                                          Variant variant) {
  FeatureExtraction out;
  out.features.reserve(clips.size());
  for (const auto& clip : clips) {
    try {
      out.features.push_back(extract_features(clip, variant));
    } catch (const Error& e) {
      spdlog::warn("{}: skipping {} ({})", to_string(variant), clip.source_id,
                   to_string(e.kind()));
      ++out.skipped[e.kind()];
    }
  }
  return out;
}

SplitSets split_features(const std::vector<FeatureVector>& features, std::uint64_t seed) {
  std::vector<std::vector<std::string>> groups(kNumClasses);
  std::map<std::string, const FeatureVector*> by_id;
  for (const auto& fv : features) {
    groups[static_cast<std::size_t>(slot_of(fv.label))].push_back(fv.source_id);
    if (!by_id.emplace(fv.source_id, &fv).second)
      throw Error(ErrorKind::DataSourceError, "duplicate source id " + fv.source_id);
  }
  const auto split = stratified_split(groups, SplitRatios{}, seed);

  auto gather = [&](const std::vector<std::string>& ids) {
    LabeledSet set;
    for (const auto& id : ids) {
      const auto* fv = by_id.at(id);
      set.add(fv->values, slot_of(fv->label));
    }
    return set;
  };
  return {gather(split.train_ids), gather(split.validation_ids), gather(split.test_ids)};
}

RunResult run_once(const std::vector<FeatureVector>& features, int run,
                   std::uint64_t base_seed, const TrainConfig& train) {
  RunResult result;
  result.run = run;
  result.seed = run_seed(base_seed, run);
  const auto sets = split_features(features, result.seed);
  const LabeledSet& train_set = sets.train;
  const LabeledSet& validation_set = sets.validation;
  const LabeledSet& test_set = sets.test;

  TrainConfig cfg = train;
  cfg.seed = result.seed;
  auto outcome = train_early_stopping(train_set, validation_set, cfg);
  result.confusion = evaluate(outcome.model, test_set);
  result.accuracy = result.confusion.accuracy();
  result.best_epoch = outcome.best_epoch;
  result.epochs_run = outcome.epochs_run;
  result.train_size = train_set.size();
  result.validation_size = validation_set.size();
  result.test_size = test_set.size();
  result.train_error_curve = std::move(outcome.train_error_curve);
  result.validation_error_curve = std::move(outcome.validation_error_curve);
  return result;
}

ExperimentReport run_experiment_on(const std::vector<AudioClip>& clips, Variant variant,
                                   int runs, std::uint64_t seed, const TrainConfig& train) {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  ExperimentReport report;
  report.variant = variant;
  report.base_seed = seed;
  report.clips_total = clips.size();

  auto extraction = extract_corpus_features(clips, variant);
  report.skipped = std::move(extraction.skipped);
  report.clips_used = extraction.features.size();
  if (extraction.features.empty())
    throw Error(ErrorKind::AllClipsSkipped,
                fmt::format("{}: no clip produced a feature vector", to_string(variant)));

  for (int run = 1; run <= runs; ++run) {
    report.per_run.push_back(run_once(extraction.features, run, seed, train));
    const auto& r = report.per_run.back();
    spdlog::info("{} run {}: accuracy {:.4f}, best epoch {}, epochs {}", to_string(variant),
                 run, r.accuracy, r.best_epoch, r.epochs_run);
  }

  double sum = 0.0;
  for (const auto& r : report.per_run) {
    sum += r.accuracy;
    report.pooled_confusion += r.confusion;
  }
  report.mean_accuracy = sum / static_cast<double>(report.per_run.size());
  return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  const auto clips = load_corpus(spec.source, spec.seed);
  return run_experiment_on(clips, spec.variant, spec.runs, spec.seed, spec.train);
}

std::vector<ExperimentReport> run_all(const ExperimentSpec& spec) {
  const auto clips = load_corpus(spec.source, spec.seed);
  std::vector<ExperimentReport> reports;
  for (const auto v : kAllVariants)
    reports.push_back(run_experiment_on(clips, v, spec.runs, spec.seed, spec.train));
  return reports;
}

std::string render_text(const ExperimentReport& report) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  const auto& cm = report.pooled_confusion;

  line(fmt::format("experiment: {} ({})", display_name(report.variant),
                   to_string(report.variant)));
  line(fmt::format("runs: {} (mean over runs; run i uses seed {} + i)",
                   report.per_run.size(), report.base_seed));
  line(fmt::format("clips: {} total, {} used", report.clips_total, report.clips_used));
  for (const auto& [kind, count] : report.skipped)
    line(fmt::format("skipped ({}): {}", to_string(kind), count));
  line("");

  line("per run:");
  line(fmt::format("  {:>4} {:>20} {:>9} {:>10} {:>7} {:>6}", "run", "seed", "accuracy",
                   "best_epoch", "epochs", "test"));
  for (const auto& r : report.per_run)
    line(fmt::format("  {:>4} {:>20} {:>9.4f} {:>10} {:>7} {:>6}", r.run, r.seed,
                     r.accuracy, r.best_epoch, r.epochs_run, r.test_size));
  line("");

  line("pooled confusion matrix (rows = true class, columns = predicted):");
  std::string header = fmt::format("  {:<12}", "");
  for (const auto i : kAllInstruments) header += fmt::format(" {:>11}", to_string(i));
  header += fmt::format(" {:>8}", "recall");
  line(header);
  for (const auto t : kAllInstruments) {
    const int r = slot_of(t);
    std::string row = fmt::format("  {:<12}", to_string(t));
    for (int c = 0; c < kNumClasses; ++c) row += fmt::format(" {:>11}", cm.counts[r][c]);
    const long n = cm.row_total(r);
    row += n == 0 ? fmt::format(" {:>8}", "-")
                  : fmt::format(" {:>8.4f}", static_cast<double>(cm.counts[r][r]) / n);
    line(row);
  }
  line("");
  line(fmt::format("accuracy: {:.4f} ({} / {})", cm.accuracy(), cm.trace(), cm.total()));
  line(fmt::format("mean_accuracy: {:.4f}", report.mean_accuracy));
  return out;
}

std::string render_csv(const ExperimentReport& report) {
  std::string out = "record,run,true_class,predicted_class,value\n";
  auto cells = [&](const ConfusionMatrix& cm, const std::string& run) {
    for (const auto t : kAllInstruments)
      for (const auto p : kAllInstruments)
        out += fmt::format("cell,{},{},{},{}\n", run, to_string(t), to_string(p),
                           cm.counts[slot_of(t)][slot_of(p)]);
  };
  cells(report.pooled_confusion, "pooled");
  for (const auto& r : report.per_run) cells(r.confusion, std::to_string(r.run));
  for (const auto& r : report.per_run) {
    out += fmt::format("run_accuracy,{},,,{:.17g}\n", r.run, r.accuracy);
    out += fmt::format("run_best_epoch,{},,,{}\n", r.run, r.best_epoch);
    out += fmt::format("run_seed,{},,,{}\n", r.run, r.seed);
  }
  for (const auto& [kind, count] : report.skipped)
    out += fmt::format("skipped_{},,,,{}\n", to_string(kind), count);
  out += fmt::format("clips_used,,,,{}\n", report.clips_used);
  out += fmt::format("pooled_accuracy,,,,{:.17g}\n", report.pooled_confusion.accuracy());
  out += fmt::format("mean_accuracy,,,,{:.17g}\n", report.mean_accuracy);
  return out;
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& out) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoError, "cannot create " + out.string());
  file << (format == ReportFormat::Text ? render_text(report) : render_csv(report));
  if (!file) throw Error(ErrorKind::IoError, "write failed: " + out.string());
}

ConfusionMatrix parse_pooled_confusion_csv(std::string_view csv) {
  ConfusionMatrix cm;
  std::istringstream in{std::string(csv)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.starts_with("cell,pooled,")) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
    if (f.size() != 5) throw Error(ErrorKind::ParseError, "bad report row: " + line);
    const auto t = parse_instrument(f[2]);
    const auto p = parse_instrument(f[3]);
    if (!t || !p) throw Error(ErrorKind::UnknownLabel, "bad report row: " + line);
    cm.counts[slot_of(*t)][slot_of(*p)] = std::stol(f[4]);
  }
  return cm;
}

std::string render_curves_csv(const ExperimentReport& report) {
  std::string out = "run,epoch,train_loss,validation_loss\n";
  for (const auto& r : report.per_run)
    for (std::size_t e = 0; e < r.train_error_curve.size(); ++e)
      out += fmt::format("{},{},{:.17g},{:.17g}\n", r.run, e, r.train_error_curve[e],
                         r.validation_error_curve[e]);
  return out;
}

std::string render_summary(const std::vector<ExperimentReport>& reports) {
  std::string out = fmt::format("{:<18} {:>9} {:>9} {:>6} {:>8}\n", "Experiment", "Accuracy",
                                "Reference", "Runs", "Skipped");
  for (const auto& r : reports) {
    std::size_t skipped = 0;
    for (const auto& [kind, count] : r.skipped) skipped += count;
    out += fmt::format("{:<18} {:>8.1f}% {:>8.1f}% {:>6} {:>8}\n", display_name(r.variant),
                       100.0 * r.mean_accuracy, 100.0 * reference_accuracy(r.variant),
                       r.per_run.size(), skipped);
  }
  return out;
}

}  // namespace timbre
