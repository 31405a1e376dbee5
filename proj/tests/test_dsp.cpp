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
#include "timbre/dsp.hpp"
#include "timbre/error.hpp"

using namespace timbre;
using timbre::testing::long_double_dft;
using timbre::testing::max_relative_error;

namespace {

std::vector<double> random_signal(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

std::vector<double> sine(double freq, double rate, std::size_t n, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return x;
}

}  // namespace

TEST_CASE("dft oracle on tiny signals") {
  const auto dc = dft_magnitude_oracle(std::vector<double>{1, 1, 1, 1});
  REQUIRE(dc.values.size() == 3);
  CHECK(dc.values[0] == doctest::Approx(4.0));
  CHECK(dc.values[1] == doctest::Approx(0.0));
  CHECK(dc.values[2] == doctest::Approx(0.0));

  const auto alt = dft_magnitude_oracle(std::vector<double>{1, -1, 1, -1});
  CHECK(alt.values[0] == doctest::Approx(0.0));
  CHECK(alt.values[1] == doctest::Approx(0.0));
  CHECK(alt.values[2] == doctest::Approx(4.0));

  CHECK(dft_magnitude_oracle(std::vector<double>{1, 2, 3, 4}, 8000.0).bin_hz == 2000.0);
}

TEST_CASE("dft oracle matches long double summation") {
  std::mt19937_64 gen(64);
  const auto x = random_signal(gen, 64);
  const auto expected = long_double_dft(x);
  const auto got = dft_magnitude_oracle(x);
  const std::vector<double> half(expected.begin(), expected.begin() + 33);
  CHECK(max_relative_error(got.values, half) <= 1e-9);
  CHECK(max_relative_error(dft_full_magnitude_oracle(x), expected) <= 1e-9);
}

TEST_CASE("empty input is rejected") {
  const std::vector<double> empty;
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ParseError;
  };
  CHECK(kind_of([&] { dft_magnitude_oracle(empty); }) == ErrorKind::EmptyInput);
  CHECK(kind_of([&] { fft_magnitude(empty, 44100); }) == ErrorKind::EmptyInput);
  CHECK(kind_of([&] { rms(empty); }) == ErrorKind::EmptyInput);
}

TEST_CASE("fft pads to a power of two and matches the oracle") {
  std::mt19937_64 gen(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 17u, 64u, 100u, 511u}) {
    const auto x = random_signal(gen, n);
    const auto fast = fft_magnitude(x, 1000.0);
    const std::size_t padded_n = next_power_of_two(n);
    CHECK(fast.values.size() == padded_n / 2 + 1);
    CHECK(fast.bin_hz == doctest::Approx(1000.0 / padded_n));

    std::vector<double> padded = x;
    padded.resize(padded_n, 0.0);
    CHECK(max_relative_error(fast.values, dft_magnitude_oracle(padded).values) <= 1e-6);
  }
}

TEST_CASE("fft of a 440 Hz sine peaks at 440 Hz") {
  const double rate = 44100.0;
  const auto x = sine(440.0, rate, 44100);
  const auto spec = fft_magnitude(x, rate);
  const auto peak = std::max_element(spec.values.begin(), spec.values.end()) - spec.values.begin();
  CHECK(std::abs(static_cast<double>(peak) * spec.bin_hz - 440.0) <= spec.bin_hz);
}

TEST_CASE("fft of silence is silent") {
  const auto spec = fft_magnitude(std::vector<double>(1000, 0.0), 8000.0);
  for (const double v : spec.values) CHECK(v == 0.0);
}

TEST_CASE("resample_to_unit_grid") {
  SUBCASE("identity grid copies values") {
    MagnitudeSpectrum spec;
    spec.bin_hz = 1.0;
    for (int f = 0; f <= 1000; ++f) spec.values.push_back(std::sqrt(f + 3.0));
    const auto grid = resample_to_unit_grid(spec);
    for (int f = 1; f <= 1000; ++f) CHECK(grid.at_hz(f) == spec.values[f]);
  }
  SUBCASE("two hertz bins interpolate midpoints") {
    MagnitudeSpectrum spec;
    spec.bin_hz = 2.0;
    for (int k = 0; k <= 500; ++k) spec.values.push_back(3.0 * k + 1.0);
    const auto grid = resample_to_unit_grid(spec);
    for (int f = 1; f < 1000; f += 2) {
      const auto k = static_cast<std::size_t>(f / 2);
      CHECK(grid.at_hz(f) == doctest::Approx((spec.values[k] + spec.values[k + 1]) / 2));
    }
    CHECK(grid.at_hz(1000) == spec.values[500]);
  }
  SUBCASE("100 ms at 44.1 kHz fills the grid") {
    const auto x = sine(440.0, 44100.0, 4410);
    const auto spec = fft_magnitude(x, 44100.0);
    CHECK(spec.bin_hz == doctest::Approx(44100.0 / 8192));
    CHECK(resample_to_unit_grid(spec).values.size() == 1000);
  }
  SUBCASE("too little bandwidth") {
    MagnitudeSpectrum spec;
    spec.bin_hz = 1.0;
    spec.values.assign(1000, 1.0);  // reaches 999 Hz only
    CHECK_THROWS_AS(resample_to_unit_grid(spec), Error);
  }
  SUBCASE("grid values stay between bracketing bins") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    MagnitudeSpectrum spec;
    spec.bin_hz = 44100.0 / 8192;
    spec.values.resize(4097);
    for (auto& v : spec.values) v = u(gen);
    const auto grid = resample_to_unit_grid(spec);
    for (int f = 1; f <= 1000; ++f) {
      const auto k = static_cast<std::size_t>(f / spec.bin_hz);
      const double lo = std::min(spec.values[k], spec.values[k + 1]);
      const double hi = std::max(spec.values[k], spec.values[k + 1]);
      CHECK(grid.at_hz(f) >= lo);
      CHECK(grid.at_hz(f) <= hi);
    }
  }
}

TEST_CASE("rms") {
  CHECK(rms(std::vector<double>{3, 3, 3, 3}) == doctest::Approx(3.0));
  CHECK(rms(std::vector<double>{1, -1, 1, -1}) == doctest::Approx(1.0));
  const auto s = sine(441.0, 44100.0, 44100);
  CHECK(rms(s) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> scale(-20.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_signal(gen, 1 + gen() % 300);
    const double c = scale(gen);
    std::vector<double> y(x);
    for (auto& v : y) v *= c;
    CHECK(rms(y) == doctest::Approx(std::abs(c) * rms(x)).epsilon(1e-9));
  }
}

TEST_CASE("db_ratio") {
  CHECK(db_ratio(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(db_ratio(3.0, 0.3) == doctest::Approx(20.0));
  CHECK(db_ratio(std::sqrt(10.0) * 0.25, 0.25) == doctest::Approx(10.0));
  CHECK_THROWS_AS(db_ratio(0.0, 1.0), Error);
  CHECK_THROWS_AS(db_ratio(1.0, -1.0), Error);
}
