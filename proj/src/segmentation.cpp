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

#include "timbre/segmentation.hpp"

#include <cmath>
#include <span>
#include <string>

#include "timbre/dsp.hpp"
#include "timbre/error.hpp"

namespace timbre {

std::size_t samples_for(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

OnsetAnalysis detect_onset(const AudioClip& clip) {
  validate_clip(clip);
  OnsetAnalysis out;
  out.window_samples = samples_for(kOnsetWindowS, clip.sample_rate);
  const std::size_t w = out.window_samples;
  if (clip.samples.size() < 2 * w)
    throw Error(ErrorKind::ClipTooShort,
                "onset detection needs at least 20 ms: " + clip.source_id);

  const std::span<const double> all(clip.samples);
  out.signal_rms = rms(all);
  const std::size_t windows = all.size() / w;
  out.window_rms.reserve(windows);
  for (std::size_t k = 0; k < windows; ++k)
    out.window_rms.push_back(rms(all.subspan(k * w, w)));

  if (out.signal_rms > 0.0) {
    for (std::size_t k = 0; k < windows; ++k) {
      const double r = out.window_rms[k];
      if (r > 0.0 && db_ratio(r, out.signal_rms) >= kOnsetThresholdDb) {
        out.onset_index = k * w;
        out.onset_time = static_cast<double>(out.onset_index) / clip.sample_rate;
        return out;
      }
    }
  }
  throw Error(ErrorKind::NoOnsetFound,
              "no 10 ms window reaches 10 dB above the signal RMS: " + clip.source_id);
}

SegmentBounds attack_bounds(const AudioClip& clip, const OnsetAnalysis& onset) {
  const std::size_t len = samples_for(kAttackS, clip.sample_rate);
  const std::size_t start = onset.onset_index;
  if (start + len > clip.samples.size())
    throw Error(ErrorKind::ClipTooShort,
                "fewer than 100 ms after the onset: " + clip.source_id);
  return {SegmentKind::Attack, start, start + len};
}

SegmentBounds steady_bounds(const AudioClip& clip, const OnsetAnalysis& onset) {
  const std::size_t start =
      onset.onset_index + samples_for(kAttackS + kAttackGuardS, clip.sample_rate);
  const std::size_t min_len = samples_for(kMinSteadyS, clip.sample_rate);
  if (start + min_len > clip.samples.size())
    throw Error(ErrorKind::ClipTooShort,
                "steady segment shorter than 100 ms: " + clip.source_id);
  return {SegmentKind::Steady, start, clip.samples.size()};
}

AudioClip slice(const AudioClip& clip, const SegmentBounds& bounds) {
  AudioClip out;
  out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(bounds.start_index),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(bounds.end_index));
  out.sample_rate = clip.sample_rate;
  out.instrument = clip.instrument;
  out.tone = clip.tone;
  out.source_id = clip.source_id;
  return out;
}

AudioClip extract_attack(const AudioClip& clip, const OnsetAnalysis& onset) {
  return slice(clip, attack_bounds(clip, onset));
}

AudioClip extract_steady(const AudioClip& clip, const OnsetAnalysis& onset) {
  return slice(clip, steady_bounds(clip, onset));
}

}  // namespace timbre
