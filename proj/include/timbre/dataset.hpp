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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace timbre {

inline constexpr int kNumClasses = 8;

/// The eight instruments, numbered 1..8 in the fixed dataset order.
enum class Instrument : std::uint8_t {
  Banjo = 1,
  Cello,
  Clarinet,
  EnglishHorn,
  Guitar,
  Oboe,
  Trumpet,
  Violin,
};

inline constexpr std::array<Instrument, kNumClasses> kAllInstruments = {
    Instrument::Banjo,  Instrument::Cello, Instrument::Clarinet,
    Instrument::EnglishHorn, Instrument::Guitar, Instrument::Oboe,
    Instrument::Trumpet, Instrument::Violin};

/// 1-based class index.
constexpr int index_of(Instrument i) { return static_cast<int>(i); }
/// 0-based position, for array indexing.
constexpr int slot_of(Instrument i) { return static_cast<int>(i) - 1; }
Instrument instrument_from_index(int index);

std::string_view to_string(Instrument i);
std::optional<Instrument> parse_instrument(std::string_view name);

enum class PitchClass : std::uint8_t { C, Cs, D, Ds, E, F, Fs, G, Gs, A, As, B };

inline constexpr int kNumPitchClasses = 12;

std::string_view to_string(PitchClass p);
std::optional<PitchClass> parse_pitch_class(std::string_view name);

/// A fourth-octave tone with its equal-tempered fundamental.
struct ToneLabel {
  PitchClass pitch_class = PitchClass::A;
  int octave = 4;
  double base_frequency = 440.0;

  bool operator==(const ToneLabel&) const = default;
};

/// Tabulated fourth-octave fundamentals (C4 = 261.63 Hz ... B4 = 493.88 Hz).
double fourth_octave_frequency(PitchClass p);
ToneLabel make_tone(PitchClass p);

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 44100;
  Instrument instrument = Instrument::Banjo;
  ToneLabel tone;
  std::string source_id;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws EmptyInput for an empty clip, UnsupportedFormat for a rate < 8000.
void validate_clip(const AudioClip& clip);

struct ManifestEntry {
  std::string path;
  Instrument instrument = Instrument::Banjo;
  ToneLabel tone;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  /// Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;
};

DatasetManifest parse_manifest(std::string_view text);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

/// Reads the WAV behind `entry`; relative paths resolve against `base_dir`.
AudioClip load_clip(const ManifestEntry& entry,
                    const std::filesystem::path& base_dir = {});

/// Per-class synthesis parameters for the stand-in corpus.
struct Partial {
  double ratio;      // multiple of the fundamental
  double amplitude;  // relative to the fundamental
};

struct InstrumentVoice {
  std::vector<Partial> partials;
  /// Short-lived inharmonic components present only during the transient.
  std::vector<Partial> attack_partials;
  double attack_decay_s;
  double rise_ms;     // time to ~95% of peak
  double decay_s;     // peak-to-sustain time constant
  double sustain;     // sustain level relative to peak
};

const InstrumentVoice& voice_of(Instrument i);

struct SynthesisParams {
  Instrument instrument = Instrument::Trumpet;
  PitchClass pitch = PitchClass::A;
  int sample_rate = 44100;
  double lead_in_s = 0.1;
  double duration_s = 2.0;
  double detune = 0.0;  // relative, e.g. 0.005 = +0.5%
  double gain = 0.5;
  /// Relative per-partial amplitude jitter, e.g. 0.03 = up to +-3%.
  double partial_jitter = 0.0;
  bool random_phase = false;
  double noise_snr_db = 0.0;  // 0 disables noise
  std::uint64_t seed = 0;     // drives phases, jitter and noise
  /// Replaces the instrument's voice when set.
  std::optional<InstrumentVoice> voice;
};

/// Deterministic additive rendering of one note.
AudioClip synthesize_clip(const SynthesisParams& params);

/// `per_class` clips for each instrument at random fourth-octave tones.
std::vector<AudioClip> generate_synthetic_corpus(std::uint64_t seed,
                                                 int per_class,
                                                 int sample_rate = 44100);

struct SplitAssignment {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> test_ids;
};

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

/// Split sizes for a group of n items by largest remainder; ties go to train,
/// then validation, then test. Each part gets at least one item when n >= 3.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Stratified split: each group (one per class) is shuffled with `seed` and
/// cut by split_sizes. Empty groups are ignored; groups of 1 or 2 items throw
/// ClassTooSmall.
SplitAssignment stratified_split(std::span<const std::vector<std::string>> groups,
                                 const SplitRatios& ratios, std::uint64_t seed);

}  // namespace timbre
