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

#include "timbre/dsp.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "timbre/error.hpp"

namespace timbre {
namespace {

using cplx = std::complex<double>;

void require_samples(std::span<const double> samples, const char* op) {
  if (samples.empty())
    throw Error(ErrorKind::EmptyInput, std::string(op) + ": empty input");
}

// e^{-2 pi i k / n} with the angle reduced exactly in integers first.
cplx twiddle(std::size_t k, std::size_t n) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) /
                       static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

std::vector<double> direct_dft(std::span<const double> x, std::size_t bins) {
  const std::size_t n = x.size();
  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    cplx acc{};
    for (std::size_t t = 0; t < n; ++t) acc += x[t] * twiddle(k * t, n);
    mag[k] = std::abs(acc);
  }
  return mag;
}

// Iterative radix-2 decimation in time; n must be a power of two.
void fft_in_place(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cplx> roots(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) roots[k] = twiddle(k, n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = a[start + k];
        const cplx v = a[start + k + half] * roots[k * stride];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

}  // namespace

std::size_t next_power_of_two(std::size_t n) {
  return n <= 1 ? 1 : std::bit_ceil(n);
}

MagnitudeSpectrum dft_magnitude_oracle(std::span<const double> samples,
                                       double sample_rate) {
  require_samples(samples, "dft_magnitude_oracle");
  const std::size_t n = samples.size();
  return {direct_dft(samples, n / 2 + 1), sample_rate / static_cast<double>(n)};
}

std::vector<double> dft_full_magnitude_oracle(std::span<const double> samples) {
  require_samples(samples, "dft_full_magnitude_oracle");
  return direct_dft(samples, samples.size());
}

MagnitudeSpectrum fft_magnitude(std::span<const double> samples, double sample_rate) {
  require_samples(samples, "fft_magnitude");
  const std::size_t n = next_power_of_two(samples.size());
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i];
  fft_in_place(buf);

  MagnitudeSpectrum out;
  out.bin_hz = sample_rate / static_cast<double>(n);
  out.values.resize(n / 2 + 1);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = std::abs(buf[k]);
  return out;
}

UnitSpectrum resample_to_unit_grid(const MagnitudeSpectrum& spec) {
  if (spec.values.empty() || !(spec.bin_hz > 0.0) ||
      static_cast<double>(spec.values.size() - 1) * spec.bin_hz < kUnitGridSize)
    throw Error(ErrorKind::InsufficientBandwidth,
                "spectrum does not reach " + std::to_string(kUnitGridSize) + " Hz");
  UnitSpectrum out;
  const std::size_t last = spec.values.size() - 1;
  for (int hz = 1; hz <= kUnitGridSize; ++hz) {
    const double pos = hz / spec.bin_hz;
    const auto lo = std::min(static_cast<std::size_t>(pos), last);
    const double frac = pos - static_cast<double>(lo);
    const double a = spec.values[lo];
    const double b = lo < last ? spec.values[lo + 1] : a;
    out.at_hz(hz) = frac == 0.0 ? a : a + frac * (b - a);
  }
  return out;
}

double rms(std::span<const double> samples) {
  require_samples(samples, "rms");
  double sum = 0.0;
  for (const double s : samples) sum += s * s;
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

double db_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error(ErrorKind::NonPositive, "db_ratio: operands must be positive");
  return 20.0 * std::log10(a / b);
}

}  // namespace timbre
