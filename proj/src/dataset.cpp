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

#include "timbre/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "timbre/error.hpp"
#include "timbre/rng.hpp"
#include "timbre/wav.hpp"

namespace timbre {
namespace {

constexpr std::array<std::string_view, kNumClasses> kInstrumentNames = {
    "Banjo", "Cello", "Clarinet", "EnglishHorn",
    "Guitar", "Oboe", "Trumpet", "Violin"};

constexpr std::array<std::string_view, kNumPitchClasses> kPitchNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

// Equal-tempered fourth octave as tabulated (two decimals).
constexpr std::array<double, kNumPitchClasses> kFourthOctaveHz = {
    261.63, 277.18, 293.66, 311.13, 329.63, 349.23,
    369.99, 392.00, 415.30, 440.00, 466.16, 493.88};

constexpr std::string_view kManifestHeader = "path,instrument,pitch_class,octave";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& why) {
  throw Error(ErrorKind::ParseError,
              "manifest line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::WrongOctave: return "WrongOctave";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InsufficientBandwidth: return "InsufficientBandwidth";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::NoOnsetFound: return "NoOnsetFound";
    case ErrorKind::ClipTooShort: return "ClipTooShort";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::DataSourceError: return "DataSourceError";
    case ErrorKind::AllClipsSkipped: return "AllClipsSkipped";
  }
  return "Unknown";
}

Instrument instrument_from_index(int index) {
  if (index < 1 || index > kNumClasses)
    throw Error(ErrorKind::UnknownLabel,
                "instrument index out of range: " + std::to_string(index));
  return static_cast<Instrument>(index);
}

std::string_view to_string(Instrument i) { return kInstrumentNames[slot_of(i)]; }

std::optional<Instrument> parse_instrument(std::string_view name) {
  for (int k = 0; k < kNumClasses; ++k)
    if (kInstrumentNames[k] == name) return static_cast<Instrument>(k + 1);
  return std::nullopt;
}

std::string_view to_string(PitchClass p) {
  return kPitchNames[static_cast<std::size_t>(p)];
}

std::optional<PitchClass> parse_pitch_class(std::string_view name) {
  for (int k = 0; k < kNumPitchClasses; ++k)
    if (kPitchNames[k] == name) return static_cast<PitchClass>(k);
  return std::nullopt;
}

double fourth_octave_frequency(PitchClass p) {
  return kFourthOctaveHz[static_cast<std::size_t>(p)];
}

ToneLabel make_tone(PitchClass p) {
  return ToneLabel{p, 4, fourth_octave_frequency(p)};
}

void validate_clip(const AudioClip& clip) {
  if (clip.samples.empty())
    throw Error(ErrorKind::EmptyInput, "clip has no samples: " + clip.source_id);
  if (clip.sample_rate < 8000)
    throw Error(ErrorKind::UnsupportedFormat,
                "sample rate below 8000 Hz: " + clip.source_id);
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest manifest;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!seen_header) {
      std::string_view header = line;
      if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
      if (header != kManifestHeader)
        parse_error(line_no, "expected header '" + std::string(kManifestHeader) + "'");
      seen_header = true;
      continue;
    }

    const auto fields = split_commas(line);
    if (fields.size() != 4)
      parse_error(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) parse_error(line_no, "empty path");

    const auto instrument = parse_instrument(fields[1]);
    if (!instrument)
      throw Error(ErrorKind::UnknownLabel, "manifest line " + std::to_string(line_no) +
                                               ": unknown instrument '" +
                                               std::string(fields[1]) + "'");
    const auto pitch = parse_pitch_class(fields[2]);
    if (!pitch)
      throw Error(ErrorKind::UnknownLabel, "manifest line " + std::to_string(line_no) +
                                               ": unknown pitch class '" +
                                               std::string(fields[2]) + "'");
    int octave = 0;
    const auto oct = fields[3];
    const auto [ptr, ec] = std::from_chars(oct.data(), oct.data() + oct.size(), octave);
    if (ec != std::errc() || ptr != oct.data() + oct.size())
      parse_error(line_no, "octave is not an integer: '" + std::string(oct) + "'");
    if (octave != 4)
      throw Error(ErrorKind::WrongOctave, "manifest line " + std::to_string(line_no) +
                                              ": octave " + std::to_string(octave) +
                                              " (only 4 is accepted)");

    manifest.entries.push_back({std::string(fields[0]), *instrument, make_tone(*pitch)});
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open manifest " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto manifest = parse_manifest(buffer.str());
  manifest.base_dir = path.parent_path();
  return manifest;
}

std::string serialize_manifest(const DatasetManifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : manifest.entries) {
    out += e.path;
    out += ',';
    out += to_string(e.instrument);
    out += ',';
    out += to_string(e.tone.pitch_class);
    out += ',';
    out += std::to_string(e.tone.octave);
    out += '\n';
  }
  return out;
}

void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out << serialize_manifest(manifest);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

AudioClip load_clip(const ManifestEntry& entry,
                    const std::filesystem::path& base_dir) {
  std::filesystem::path file(entry.path);
  if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
  const auto wav = read_wav(file);

  AudioClip clip;
  clip.samples = downmix(wav);
  clip.sample_rate = wav.sample_rate;
  clip.instrument = entry.instrument;
  clip.tone = entry.tone;
  clip.source_id = entry.path;
  if (clip.samples.empty())
    throw Error(ErrorKind::UnsupportedFormat, "no audio frames in " + file.string());
  return clip;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
  const double total = r[0] + r[1] + r[2];
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = static_cast<double>(n) * r[k] / total;
    sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  // Largest remainder; stable ordering resolves ties train, validation, test.
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainder[a] > remainder[b] + 1e-9;
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];

  if (n >= 3) {
    for (int k = 0; k < 3; ++k) {
      if (sizes[k] == 0) {
        auto largest = std::max_element(sizes.begin(), sizes.end());
        --*largest;
        ++sizes[k];
      }
    }
  }
  return sizes;
}

SplitAssignment stratified_split(std::span<const std::vector<std::string>> groups,
                                 const SplitRatios& ratios, std::uint64_t seed) {
  SplitAssignment out;
  Rng rng(seed);
  for (const auto& group : groups) {
    if (group.empty()) continue;
    if (group.size() < 3)
      throw Error(ErrorKind::ClassTooSmall,
                  "class with " + std::to_string(group.size()) +
                      " item(s); at least 3 are needed for a 3-way split");
    std::vector<std::string> ids = group;
    std::sort(ids.begin(), ids.end());
    rng.shuffle(std::span<std::string>(ids));
    const auto sizes = split_sizes(ids.size(), ratios);
    auto it = ids.begin();
    out.train_ids.insert(out.train_ids.end(), it, it + sizes[0]);
    it += sizes[0];
    out.validation_ids.insert(out.validation_ids.end(), it, it + sizes[1]);
    it += sizes[1];
    out.test_ids.insert(out.test_ids.end(), it, ids.end());
  }
  return out;
}

}  // namespace timbre
