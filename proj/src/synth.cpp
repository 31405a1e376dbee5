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

#include <cmath>
#include <numbers>
#include <string>

#include "timbre/dataset.hpp"
#include "timbre/rng.hpp"

namespace timbre {
namespace {

// Fixed voice table for the stand-in corpus. Only partials below roughly
// 2.2x the fundamental survive the 1-1000 Hz cut once shifted to A4, so the
// second-harmonic level is what separates the steady spectra; each class also
// carries one short inharmonic transient partial.
const std::array<InstrumentVoice, kNumClasses> kVoices = {{
    // Banjo: bright pluck, no real sustain.
    {{{1, 1.0}, {2, 0.72}, {3, 0.55}, {4, 0.40}, {5, 0.25}},
     {{1.41, 0.8}}, 0.020, 5.0, 0.10, 0.02},
    // Cello
    {{{1, 1.0}, {2, 0.55}, {3, 0.45}, {4, 0.30}, {5, 0.20}, {6, 0.10}},
     {{0.71, 0.6}}, 0.030, 45.0, 0.06, 0.10},
    // Clarinet: odd harmonics dominate.
    {{{1, 1.0}, {2, 0.05}, {3, 0.60}, {4, 0.03}, {5, 0.35}, {7, 0.20}},
     {{1.73, 0.6}}, 0.025, 30.0, 0.05, 0.10},
    // English horn
    {{{1, 1.0}, {2, 0.65}, {3, 0.60}, {4, 0.30}},
     {{0.59, 0.6}}, 0.030, 25.0, 0.06, 0.09},
    // Guitar: softer pluck than the banjo.
    {{{1, 1.0}, {2, 0.25}, {3, 0.25}, {4, 0.12}},
     {{1.27, 0.7}}, 0.025, 8.0, 0.12, 0.02},
    // Oboe
    {{{1, 1.0}, {2, 0.35}, {3, 0.70}, {4, 0.40}, {5, 0.30}},
     {{0.83, 0.6}}, 0.025, 20.0, 0.05, 0.10},
    // Trumpet
    {{{1, 1.0}, {2, 0.15}, {3, 0.50}, {4, 0.45}, {5, 0.30}},
     {{1.58, 0.6}}, 0.020, 15.0, 0.05, 0.10},
    // Violin: slow bowed onset.
    {{{1, 1.0}, {2, 0.45}, {3, 0.40}, {4, 0.35}, {5, 0.25}},
     {{0.47, 0.6}}, 0.035, 60.0, 0.06, 0.09},
}};

constexpr double kReleaseS = 0.05;

// Concave rise reaching 95% at rise_ms, normalized to exactly 1 there, then an
// exponential fall to the sustain level and a short linear release.
double envelope(const InstrumentVoice& v, double t, double note_len) {
  if (t < 0.0) return 0.0;
  const double rise = v.rise_ms * 1e-3;
  double level;
  if (t < rise) {
    const double tau = rise / 3.0;
    level = (1.0 - std::exp(-t / tau)) / (1.0 - std::exp(-3.0));
  } else {
    level = v.sustain + (1.0 - v.sustain) * std::exp(-(t - rise) / v.decay_s);
  }
  const double to_end = note_len - t;
  if (to_end < kReleaseS) level *= std::max(0.0, to_end / kReleaseS);
  return level;
}

}  // namespace

const InstrumentVoice& voice_of(Instrument i) { return kVoices[slot_of(i)]; }

AudioClip synthesize_clip(const SynthesisParams& params) {
  const auto& voice = params.voice ? *params.voice : voice_of(params.instrument);
  const double rate = params.sample_rate;
  const double f0 = fourth_octave_frequency(params.pitch) * (1.0 + params.detune);
  const auto lead = static_cast<std::size_t>(std::llround(params.lead_in_s * rate));
  const auto note = static_cast<std::size_t>(std::llround(params.duration_s * rate));
  const double note_len = static_cast<double>(note) / rate;
  const double nyquist = rate / 2.0;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Rng rng(params.seed);
  struct Component {
    double freq, amp, phase;
    bool transient;
  };
  std::vector<Component> components;
  auto add = [&](const Partial& p, bool transient) {
    const double freq = f0 * p.ratio;
    if (freq >= nyquist) return;
    const double jitter = 1.0 + params.partial_jitter * rng.uniform(-1.0, 1.0);
    const double phase = params.random_phase ? two_pi * rng.uniform() : 0.0;
    components.push_back({freq, p.amplitude * jitter, phase, transient});
  };
  for (const auto& p : voice.partials) add(p, false);
  for (const auto& p : voice.attack_partials) add(p, true);

  double norm = 0.0;
  for (const auto& c : components)
    if (!c.transient) norm += c.amp;

  AudioClip clip;
  clip.sample_rate = params.sample_rate;
  clip.instrument = params.instrument;
  clip.tone = make_tone(params.pitch);
  clip.samples.assign(lead + note, 0.0);

  for (std::size_t n = 0; n < note; ++n) {
    const double t = static_cast<double>(n) / rate;
    const double env = envelope(voice, t, note_len);
    if (env == 0.0) continue;
    const double transient_env = std::exp(-t / voice.attack_decay_s);
    double sum = 0.0;
    for (const auto& c : components) {
      const double amp = c.transient ? c.amp * transient_env : c.amp;
      sum += amp * std::sin(two_pi * c.freq * t + c.phase);
    }
    clip.samples[lead + n] = params.gain * env * sum / norm;
  }

  if (params.noise_snr_db > 0.0) {
    double energy = 0.0;
    for (const double s : clip.samples) energy += s * s;
    const double signal_rms = std::sqrt(energy / static_cast<double>(clip.samples.size()));
    const double sigma = signal_rms * std::pow(10.0, -params.noise_snr_db / 20.0);
    for (double& s : clip.samples) s += sigma * rng.normal();
  }
  return clip;
}

std::vector<AudioClip> generate_synthetic_corpus(std::uint64_t seed, int per_class,
                                                 int sample_rate) {
  std::vector<AudioClip> corpus;
  corpus.reserve(static_cast<std::size_t>(per_class) * kNumClasses);
  Rng rng(seed);
  // Lead-in is a whole number of 10 ms analysis windows so the programmed
  // onset sits on the onset detector's grid.
  const double window_s =
      static_cast<double>(std::lround(0.010 * sample_rate)) / sample_rate;
  for (const auto instrument : kAllInstruments) {
    for (int k = 0; k < per_class; ++k) {
      SynthesisParams p;
      p.instrument = instrument;
      p.pitch = static_cast<PitchClass>(rng.below(kNumPitchClasses));
      p.sample_rate = sample_rate;
      p.lead_in_s = window_s * static_cast<double>(5 + rng.below(11));
      p.duration_s = rng.uniform(1.6, 2.0);
      p.detune = rng.uniform(-0.005, 0.005);
      p.gain = rng.uniform(0.3, 0.8);
      p.partial_jitter = 0.03;
      p.random_phase = true;
      p.noise_snr_db = rng.uniform(30.0, 40.0);
      p.seed = rng.next();
      auto clip = synthesize_clip(p);
      clip.source_id = std::string(to_string(instrument)) + "_" +
                       std::string(to_string(p.pitch)) + "4_" +
                       (k < 9 ? "0" : "") + std::to_string(k + 1);
      corpus.push_back(std::move(clip));
    }
  }
  return corpus;
}

}  // namespace timbre
