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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timbre/dataset.hpp"
#include "timbre/dsp.hpp"

namespace timbre {

enum class Variant { Base, AttackOnly, WithoutAttack, First100Hz, Following900Hz };

inline constexpr std::array<Variant, 5> kAllVariants = {
    Variant::Base, Variant::AttackOnly, Variant::WithoutAttack,
    Variant::First100Hz, Variant::Following900Hz};

/// Identifier used in files and on the command line, e.g. "AttackOnly".
std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
/// Row label for summary tables, e.g. "Only attack".
std::string_view display_name(Variant v);

inline constexpr int kNumBands = 50;
inline constexpr int kBandWidthHz = kUnitGridSize / kNumBands;
inline constexpr double kReferencePitchHz = 440.0;
inline constexpr int kLowBandTopHz = 100;

using Bands = std::array<double, kNumBands>;

struct FeatureVector {
  Bands values{};
  Instrument label = Instrument::Banjo;
  Variant variant = Variant::Base;
  std::string source_id;
};

/// Rescales the frequency axis by 440 / f0: out(f) = in(f * f0 / 440),
/// linearly interpolated, zero outside the 1..1000 Hz source range.
UnitSpectrum shift_to_a4(const UnitSpectrum& spec, const ToneLabel& tone);

/// First100Hz keeps 1..100 Hz, Following900Hz keeps 101..1000 Hz.
UnitSpectrum apply_band_mask(const UnitSpectrum& spec, Variant variant);

/// Band k is the mean over 20k+1 .. 20k+20 Hz.
Bands partition_50(const UnitSpectrum& spec);

/// Min-max scaling into [0, 1]; a constant vector maps to all zeros.
Bands normalize(const Bands& values);

/// Time-domain segment the variant analyses.
AudioClip select_segment(const AudioClip& clip, Variant variant);

/// Everything up to (not including) normalization.
Bands raw_bands(const AudioClip& clip, Variant variant);

FeatureVector extract_features(const AudioClip& clip, Variant variant);

// Feature CSV: header source_id,instrument,variant,f00..f49.
std::string feature_csv_header();
std::string to_csv_row(const FeatureVector& fv);
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> parse_feature_csv(std::string_view text);
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);

}  // namespace timbre
