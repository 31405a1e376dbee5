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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "timbre/error.hpp"
#include "timbre/segmentation.hpp"

using namespace timbre;

namespace {

AudioClip make_clip(std::vector<double> samples, int rate = 44100) {
  AudioClip clip;
  clip.samples = std::move(samples);
  clip.sample_rate = rate;
  clip.instrument = Instrument::Guitar;
  clip.tone = make_tone(PitchClass::E);
  clip.source_id = "guitar_E4";
  return clip;
}

std::vector<double> sine(double freq, std::size_t n, double amp = 1.0, int rate = 44100) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return x;
}

ErrorKind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected timbre::Error");
  return ErrorKind::ParseError;
}

// Stand-in onset at an arbitrary sample index.
OnsetAnalysis onset_at(std::size_t index, int rate = 44100) {
  OnsetAnalysis o;
  o.window_samples = samples_for(kOnsetWindowS, rate);
  o.onset_index = index;
  o.onset_time = static_cast<double>(index) / rate;
  return o;
}

}  // namespace

TEST_CASE("near silence then a sine burst") {
  // 500 ms at 1e-4 followed by 50 ms full-scale sine. A longer burst would
  // raise the average and the window would no longer clear 10 dB.
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  std::vector<double> x(22050);
  for (auto& v : x) v = u(gen);
  const auto burst = sine(440.0, 2205);
  x.insert(x.end(), burst.begin(), burst.end());
  const auto clip = make_clip(x);

  const auto onset = detect_onset(clip);
  const auto oracle = timbre::testing::brute_force_onset(clip.samples, clip.sample_rate);
  REQUIRE(oracle.has_value());
  CHECK(onset.onset_index == *oracle);
  CHECK(onset.onset_time >= 0.50);
  CHECK(onset.onset_time <= 0.52);
  CHECK(onset.window_samples == 441);
  CHECK(onset.onset_index % onset.window_samples == 0);
  CHECK(onset.window_rms.size() == x.size() / 441);
}

TEST_CASE("no onset in steady or silent signals") {
  CHECK(error_kind([] { detect_onset(make_clip(sine(330.0, 44100))); }) == ErrorKind::NoOnsetFound);
  CHECK(error_kind([] { detect_onset(make_clip(std::vector<double>(44100, 0.0))); }) ==
        ErrorKind::NoOnsetFound);
  CHECK(error_kind([] { detect_onset(make_clip(sine(330.0, 800))); }) == ErrorKind::ClipTooShort);
}

TEST_CASE("trailing partial window is ignored") {
  // Silence for 20 full windows, then a burst shorter than one window.
  std::vector<double> x(20 * 441, 0.0);
  for (int i = 0; i < 200; ++i) x.push_back(1.0);
  CHECK(error_kind([&] { detect_onset(make_clip(x)); }) == ErrorKind::NoOnsetFound);
}

TEST_CASE("onset is scale invariant") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> t(0.2, 1.0);
  std::uniform_real_distribution<double> c(1e-3, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto clip = timbre::testing::programmed_onset_clip(t(gen), 300.0 + trial * 7.0, gen());
    const auto base = detect_onset(clip);
    const double scale = c(gen);
    for (auto& s : clip.samples) s *= scale;
    CHECK(detect_onset(clip).onset_index == base.onset_index);
  }
}

TEST_CASE("extract_attack") {
  const auto clip = make_clip(sine(440.0, 88200));
  SUBCASE("half a second in") {
    const auto seg = extract_attack(clip, onset_at(22050));
    REQUIRE(seg.samples.size() == 4410);
    CHECK(seg.samples.front() == clip.samples[22050]);
    CHECK(seg.samples.back() == clip.samples[22050 + 4409]);
    CHECK(seg.instrument == clip.instrument);
    CHECK(seg.tone == clip.tone);
    CHECK(seg.source_id == clip.source_id);
  }
  SUBCASE("exactly 100 ms") {
    const auto short_clip = make_clip(sine(440.0, 4410));
    CHECK(extract_attack(short_clip, onset_at(0)).samples == short_clip.samples);
  }
  SUBCASE("too close to the end") {
    CHECK(error_kind([&] { extract_attack(clip, onset_at(88200 - 2205)); }) == ErrorKind::ClipTooShort);
  }
}

TEST_CASE("extract_steady") {
  SUBCASE("two second clip, onset at 0.5 s") {
    const auto clip = make_clip(sine(440.0, 88200));
    const auto bounds = steady_bounds(clip, onset_at(22050));
    CHECK(bounds.start_index == 35280);  // 0.8 s
    CHECK(bounds.end_index == 88200);
    CHECK(extract_steady(clip, onset_at(22050)).samples.size() == 88200 - 35280);
  }
  SUBCASE("minimum length") {
    const auto clip = make_clip(sine(440.0, 22050 + 17640));  // onset + 400 ms
    CHECK(extract_steady(clip, onset_at(22050)).samples.size() == 4410);
  }
  SUBCASE("too short") {
    const auto clip = make_clip(sine(440.0, 22050 + 15435));  // onset + 350 ms
    CHECK(error_kind([&] { extract_steady(clip, onset_at(22050)); }) == ErrorKind::ClipTooShort);
  }
}

TEST_CASE("segments tile the clip") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> t(0.2, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto clip = timbre::testing::programmed_onset_clip(t(gen), 440.0, gen());
    const auto onset = detect_onset(clip);
    const auto attack = attack_bounds(clip, onset);
    const auto steady = steady_bounds(clip, onset);
    CHECK(attack.start_index == onset.onset_index);
    CHECK(attack.end_index - attack.start_index == 4410);
    CHECK(steady.start_index - attack.end_index == 8820);
    CHECK(steady.end_index == clip.samples.size());

    std::vector<double> rebuilt(clip.samples.begin(), clip.samples.begin() + attack.start_index);
    const auto a = slice(clip, attack);
    rebuilt.insert(rebuilt.end(), a.samples.begin(), a.samples.end());
    rebuilt.insert(rebuilt.end(), clip.samples.begin() + attack.end_index,
                   clip.samples.begin() + steady.start_index);
    const auto s = slice(clip, steady);
    rebuilt.insert(rebuilt.end(), s.samples.begin(), s.samples.end());
    CHECK(rebuilt == clip.samples);
  }
}
