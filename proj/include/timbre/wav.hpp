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

#include <filesystem>
#include <span>
#include <vector>

namespace timbre {

enum class WavEncoding { Pcm16, Float32 };

struct WavData {
  int sample_rate = 0;
  int channels = 0;
  /// Interleaved, scaled to [-1, 1].
  std::vector<double> samples;
};

/// Parses RIFF/WAVE holding 16-bit PCM or 32-bit IEEE float, 1 or 2 channels.
WavData decode_wav(std::span<const unsigned char> bytes);
WavData read_wav(const std::filesystem::path& path);

/// Averages channels into one.
std::vector<double> downmix(const WavData& wav);

/// `interleaved` holds frames of `channels` samples each.
std::vector<unsigned char> encode_wav(std::span<const double> interleaved,
                                      int channels, int sample_rate,
                                      WavEncoding encoding);
void write_wav(const std::filesystem::path& path, std::span<const double> mono,
               int sample_rate, WavEncoding encoding = WavEncoding::Float32);

}  // namespace timbre
