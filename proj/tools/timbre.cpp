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

// timbre: instrument-recognition experiment harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "timbre/dataset.hpp"
#include "timbre/error.hpp"
#include "timbre/experiment.hpp"
#include "timbre/features.hpp"
#include "timbre/log.hpp"
#include "timbre/mlp.hpp"
#include "timbre/wav.hpp"

namespace fs = std::filesystem;
using namespace timbre;

namespace {

constexpr int kExitErrorBase = 10;

Variant variant_arg(const std::string& name) {
  if (const auto v = parse_variant(name)) return *v;
  throw CLI::ValidationError("--variant", "unknown variant '" + name + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

void cmd_synth(std::uint64_t seed, int per_class, const fs::path& dir) {
  fs::create_directories(dir);
  const auto clips = generate_synthetic_corpus(seed, per_class);
  DatasetManifest manifest;
  for (const auto& clip : clips) {
    const std::string file = clip.source_id + ".wav";
    write_wav(dir / file, clip.samples, clip.sample_rate, WavEncoding::Float32);
    manifest.entries.push_back({file, clip.instrument, clip.tone});
  }
  save_manifest(manifest, dir / "manifest.csv");
  fmt::print("wrote {} clips and {}\n", clips.size(), (dir / "manifest.csv").string());
}

void cmd_features(const fs::path& manifest_path, Variant variant, const fs::path& out) {
  const auto clips = load_corpus(ManifestSource{manifest_path}, 0);
  const auto extraction = extract_corpus_features(clips, variant);
  write_feature_csv(out, extraction.features);
  std::size_t skipped = 0;
  for (const auto& [kind, count] : extraction.skipped) skipped += count;
  fmt::print("{} feature vectors written to {} ({} skipped)\n", extraction.features.size(),
             out.string(), skipped);
}

void cmd_train(const fs::path& features_path, const TrainConfig& base, const fs::path& out) {
  const auto features = read_feature_csv(features_path);
  if (features.empty()) throw Error(ErrorKind::EmptySet, "no feature rows in " + features_path.string());
  const auto sets = split_features(features, base.seed);
  const auto outcome = train_early_stopping(sets.train, sets.validation, base);
  const auto cm = evaluate(outcome.model, sets.test);
  save_model(out, outcome.model, base);
  fmt::print("best epoch {} of {}; validation loss {:.6f}; test accuracy {:.4f} ({}/{})\n",
             outcome.best_epoch, outcome.epochs_run,
             outcome.validation_error_curve[static_cast<std::size_t>(outcome.best_epoch)],
             cm.accuracy(), cm.trace(), cm.total());
  fmt::print("model written to {}\n", out.string());
}

void write_variant_reports(const ExperimentReport& report, const fs::path& dir) {
  const std::string stem(to_string(report.variant));
  emit_report(report, ReportFormat::Text, dir / (stem + ".txt"));
  emit_report(report, ReportFormat::Csv, dir / (stem + ".csv"));
  write_text(dir / (stem + "_curves.csv"), render_curves_csv(report));
}

void cmd_experiment(const ExperimentSpec& spec, bool all, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<ExperimentReport> reports;
  if (all) {
    reports = run_all(spec);
  } else {
    reports.push_back(run_experiment(spec));
  }
  for (const auto& r : reports) write_variant_reports(r, dir);
  const std::string summary = render_summary(reports);
  if (all) write_text(dir / "summary.txt", summary);
  fmt::print("{}", summary);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Musical instrument recognition from spectral band features"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int per_class = 40;
  std::string out;
  std::string manifest;
  std::string variant_name = "Base";
  std::string features_path;
  TrainConfig train_cfg;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and manifest");
  synth->add_option("--seed", seed, "RNG seed")->required();
  synth->add_option("--per-class", per_class, "Clips per instrument")->required()->check(CLI::PositiveNumber);
  synth->add_option("--out", out, "Output directory")->required();

  auto* features = app.add_subcommand("features", "Extract feature vectors to CSV");
  features->add_option("--manifest", manifest, "Manifest CSV")->required();
  features->add_option("--variant", variant_name, "Base|AttackOnly|WithoutAttack|First100Hz|Following900Hz")->required();
  features->add_option("--out", out, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Train a model on a feature CSV");
  train->add_option("--features", features_path, "Feature CSV")->required();
  train->add_option("--seed", seed, "Split and initialization seed")->required();
  train->add_option("--out", out, "Model file (JSON)")->required();
  train->add_option("--max-epochs", train_cfg.max_epochs, "Epoch limit")->capture_default_str();
  train->add_option("--max-fail", train_cfg.max_fail, "Early-stopping patience")->capture_default_str();
  train->add_option("--hidden", train_cfg.hidden, "Hidden units")->capture_default_str();

  int synthetic = 0;
  bool all = false;
  int runs = 10;
  std::string report_dir;
  auto* experiment = app.add_subcommand("experiment", "Run one or all five experiments");
  auto* manifest_opt = experiment->add_option("--manifest", manifest, "Manifest CSV");
  auto* synthetic_opt =
      experiment->add_option("--synthetic", synthetic, "Synthetic corpus, clips per class")
          ->check(CLI::PositiveNumber);
  manifest_opt->excludes(synthetic_opt);
  auto* variant_opt = experiment->add_option("--variant", variant_name, "Single variant");
  auto* all_opt = experiment->add_flag("--all", all, "Run all five variants");
  variant_opt->excludes(all_opt);
  experiment->add_option("--runs", runs, "Runs to average")->capture_default_str()->check(CLI::PositiveNumber);
  experiment->add_option("--seed", seed, "Base seed")->required();
  experiment->add_option("--report-dir", report_dir, "Report directory")->required();
  experiment->add_option("--max-epochs", train_cfg.max_epochs, "Epoch limit")->capture_default_str();
  experiment->add_option("--max-fail", train_cfg.max_fail, "Early-stopping patience")->capture_default_str();
  experiment->add_option("--hidden", train_cfg.hidden, "Hidden units")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      cmd_synth(seed, per_class, out);
    } else if (*features) {
      cmd_features(manifest, variant_arg(variant_name), out);
    } else if (*train) {
      train_cfg.seed = seed;
      cmd_train(features_path, train_cfg, out);
    } else if (*experiment) {
      if (manifest_opt->count() == 0 && synthetic_opt->count() == 0)
        throw CLI::RequiredError("--manifest or --synthetic");
      if (variant_opt->count() == 0 && !all) throw CLI::RequiredError("--variant or --all");
      ExperimentSpec spec;
      spec.runs = runs;
      spec.seed = seed;
      spec.train = train_cfg;
      if (!all) spec.variant = variant_arg(variant_name);
      if (manifest_opt->count() > 0)
        spec.source = ManifestSource{manifest};
      else
        spec.source = SyntheticSource{synthetic};
      cmd_experiment(spec, all, report_dir);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    return kExitErrorBase + static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
