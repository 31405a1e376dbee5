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
#include <span>
#include <vector>

namespace timbre {

/// Linear magnitudes for bins 0..N/2 spaced bin_hz apart.
struct MagnitudeSpectrum {
  std::vector<double> values;
  double bin_hz = 1.0;
};

inline constexpr int kUnitGridSize = 1000;

/// Magnitude at 1, 2, ..., 1000 Hz; values[k] is the magnitude at k+1 Hz.
struct UnitSpectrum {
  std::array<double, kUnitGridSize> values{};

  double at_hz(int hz) const { return values[static_cast<std::size_t>(hz - 1)]; }
  double& at_hz(int hz) { return values[static_cast<std::size_t>(hz - 1)]; }
};

std::size_t next_power_of_two(std::size_t n);

/// Direct O(N^2) DFT magnitude for bins 0..N/2 of the unpadded input; bin_hz
/// is sample_rate / N. Reference implementation for fft_magnitude.
MagnitudeSpectrum dft_magnitude_oracle(std::span<const double> samples,
                                       double sample_rate = 1.0);

/// Direct DFT magnitude over all N bins (0..N-1).
std::vector<double> dft_full_magnitude_oracle(std::span<const double> samples);

/// Zero-pads to the next power of two N and returns |DFT| for bins 0..N/2
/// with bin_hz = sample_rate / N. No window is applied.
MagnitudeSpectrum fft_magnitude(std::span<const double> samples, double sample_rate);

/// Linear interpolation onto integer frequencies 1..1000 Hz (DC excluded).
/// Throws InsufficientBandwidth unless the top bin reaches 1000 Hz.
UnitSpectrum resample_to_unit_grid(const MagnitudeSpectrum& spec);

double rms(std::span<const double> samples);

/// 20 log10(a / b) for amplitude quantities such as RMS levels.
double db_ratio(double a, double b);

}  // namespace timbre
