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

#include "timbre/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "timbre/error.hpp"
#include "timbre/segmentation.hpp"

namespace timbre {
namespace {

constexpr std::array<std::string_view, 5> kVariantIds = {
    "Base", "AttackOnly", "WithoutAttack", "First100Hz", "Following900Hz"};
constexpr std::array<std::string_view, 5> kVariantLabels = {
    "Base experiment", "Only attack", "Without attack", "First 100Hz",
    "Following 900Hz"};

[[noreturn]] void csv_error(std::size_t line_no, const std::string& why) {
  throw Error(ErrorKind::ParseError,
              "feature csv line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::string_view to_string(Variant v) { return kVariantIds[static_cast<std::size_t>(v)]; }

std::optional<Variant> parse_variant(std::string_view name) {
  for (std::size_t k = 0; k < kVariantIds.size(); ++k)
    if (kVariantIds[k] == name) return static_cast<Variant>(k);
  return std::nullopt;
}

std::string_view display_name(Variant v) {
  return kVariantLabels[static_cast<std::size_t>(v)];
}

UnitSpectrum shift_to_a4(const UnitSpectrum& spec, const ToneLabel& tone) {
  const double source_per_out = tone.base_frequency / kReferencePitchHz;
  UnitSpectrum out;
  for (int hz = 1; hz <= kUnitGridSize; ++hz) {
    const double src = hz * source_per_out;
    if (src < 1.0 || src > kUnitGridSize) continue;
    const auto lo = static_cast<int>(std::floor(src));
    const double frac = src - lo;
    const double a = spec.at_hz(lo);
    out.at_hz(hz) = frac == 0.0 ? a : a + frac * (spec.at_hz(lo + 1) - a);
  }
  return out;
}

UnitSpectrum apply_band_mask(const UnitSpectrum& spec, Variant variant) {
  UnitSpectrum out = spec;
  if (variant == Variant::First100Hz) {
    for (int hz = kLowBandTopHz + 1; hz <= kUnitGridSize; ++hz) out.at_hz(hz) = 0.0;
  } else if (variant == Variant::Following900Hz) {
    for (int hz = 1; hz <= kLowBandTopHz; ++hz) out.at_hz(hz) = 0.0;
  }
  return out;
}

Bands partition_50(const UnitSpectrum& spec) {
  Bands out{};
  for (int k = 0; k < kNumBands; ++k) {
    double sum = 0.0;
    for (int hz = kBandWidthHz * k + 1; hz <= kBandWidthHz * (k + 1); ++hz)
      sum += spec.at_hz(hz);
    out[static_cast<std::size_t>(k)] = sum / kBandWidthHz;
  }
  return out;
}

Bands normalize(const Bands& values) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  Bands out{};
  if (!(range > 0.0)) return out;
  for (std::size_t k = 0; k < values.size(); ++k)
    out[k] = std::clamp((values[k] - lo) / range, 0.0, 1.0);
  return out;
}

AudioClip select_segment(const AudioClip& clip, Variant variant) {
  switch (variant) {
    case Variant::AttackOnly:
      return extract_attack(clip, detect_onset(clip));
    case Variant::WithoutAttack:
      return extract_steady(clip, detect_onset(clip));
    default:
      return clip;
  }
}

Bands raw_bands(const AudioClip& clip, Variant variant) {
  validate_clip(clip);
  const bool whole = variant == Variant::Base || variant == Variant::First100Hz ||
                     variant == Variant::Following900Hz;
  const AudioClip segment = whole ? AudioClip{} : select_segment(clip, variant);
  const auto& samples = whole ? clip.samples : segment.samples;

  const auto spectrum = fft_magnitude(samples, clip.sample_rate);
  const auto grid = resample_to_unit_grid(spectrum);
  const auto shifted = shift_to_a4(grid, clip.tone);
  return partition_50(apply_band_mask(shifted, variant));
}

FeatureVector extract_features(const AudioClip& clip, Variant variant) {
  FeatureVector fv;
  fv.values = normalize(raw_bands(clip, variant));
  fv.label = clip.instrument;
  fv.variant = variant;
  fv.source_id = clip.source_id;
  return fv;
}

std::string feature_csv_header() {
  std::string out = "source_id,instrument,variant";
  for (int k = 0; k < kNumBands; ++k) out += fmt::format(",f{:02d}", k);
  return out;
}

std::string to_csv_row(const FeatureVector& fv) {
  std::string out = fmt::format("{},{},{}", fv.source_id, to_string(fv.label),
                                to_string(fv.variant));
  for (const double v : fv.values) out += fmt::format(",{:.17g}", v);
  return out;
}

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out << feature_csv_header() << '\n';
  for (const auto& row : rows) out << to_csv_row(row) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::vector<FeatureVector> parse_feature_csv(std::string_view text) {
  std::vector<FeatureVector> rows;
  const std::string header = feature_csv_header();
  std::size_t line_no = 0;
  bool seen_header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) csv_error(line_no, "unexpected header");
      seen_header = true;
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (true) {
      const auto comma = line.find(',', f);
      fields.push_back(line.substr(f, comma - f));
      if (comma == std::string_view::npos) break;
      f = comma + 1;
    }
    if (fields.size() != 3 + kNumBands)
      csv_error(line_no, "expected " + std::to_string(3 + kNumBands) + " fields");

    FeatureVector fv;
    fv.source_id = std::string(fields[0]);
    const auto label = parse_instrument(fields[1]);
    if (!label)
      throw Error(ErrorKind::UnknownLabel,
                  "feature csv line " + std::to_string(line_no) + ": unknown instrument");
    fv.label = *label;
    const auto variant = parse_variant(fields[2]);
    if (!variant) csv_error(line_no, "unknown variant '" + std::string(fields[2]) + "'");
    fv.variant = *variant;
    for (int k = 0; k < kNumBands; ++k) {
      const auto field = fields[static_cast<std::size_t>(3 + k)];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        csv_error(line_no, "bad number '" + std::string(field) + "'");
      fv.values[static_cast<std::size_t>(k)] = v;
    }
    rows.push_back(std::move(fv));
  }
  return rows;
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_feature_csv(buffer.str());
}

}  // namespace timbre
