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

#include <cstddef>
#include <vector>

#include "timbre/dataset.hpp"

namespace timbre {

inline constexpr double kOnsetWindowS = 0.010;
inline constexpr double kOnsetThresholdDb = 10.0;
inline constexpr double kAttackS = 0.100;
inline constexpr double kAttackGuardS = 0.200;
inline constexpr double kMinSteadyS = 0.100;

/// Number of samples spanning `seconds` at `sample_rate`, rounded.
std::size_t samples_for(double seconds, int sample_rate);

struct OnsetAnalysis {
  std::size_t window_samples = 0;
  std::size_t onset_index = 0;
  double onset_time = 0.0;
  double signal_rms = 0.0;
  /// RMS of each complete 10 ms window; a trailing partial window is dropped.
  std::vector<double> window_rms;
};

/// Onset = start of the first complete 10 ms window whose RMS is at least
/// 10 dB (amplitude) above the whole-signal RMS. Zero-RMS windows never count.
/// Throws ClipTooShort below 20 ms and NoOnsetFound when nothing crosses.
OnsetAnalysis detect_onset(const AudioClip& clip);

enum class SegmentKind { Attack, Steady };

struct SegmentBounds {
  SegmentKind kind;
  std::size_t start_index;
  std::size_t end_index;  // exclusive
};

SegmentBounds attack_bounds(const AudioClip& clip, const OnsetAnalysis& onset);
SegmentBounds steady_bounds(const AudioClip& clip, const OnsetAnalysis& onset);

/// Sub-clip carrying the parent's labels and source id.
AudioClip slice(const AudioClip& clip, const SegmentBounds& bounds);

/// [onset, onset + 100 ms).
AudioClip extract_attack(const AudioClip& clip, const OnsetAnalysis& onset);
/// [onset + 300 ms, end); at least 100 ms long.
AudioClip extract_steady(const AudioClip& clip, const OnsetAnalysis& onset);

}  // namespace timbre
