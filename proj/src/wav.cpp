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

#include "timbre/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "timbre/error.hpp"

namespace timbre {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const unsigned char> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void unsupported(const std::string& why) {
  throw Error(ErrorKind::UnsupportedFormat, "wav: " + why);
}

}  // namespace

WavData decode_wav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
    unsupported("not a RIFF/WAVE stream");

  std::uint16_t format = 0;
  int channels = 0;
  int bits = 0;
  int sample_rate = 0;
  bool have_fmt = false;
  std::span<const unsigned char> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    // A truncated final data chunk is tolerated; anything else must fit.
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (tag_is(bytes, pos, "fmt ")) {
      if (avail < 16) unsupported("short fmt chunk");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = static_cast<int>(read_u32(bytes, body + 4));
      bits = read_u16(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) unsupported("short extensible fmt chunk");
        format = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }

  if (!have_fmt) unsupported("missing fmt chunk");
  if (!have_data) unsupported("missing data chunk");
  if (channels < 1 || channels > 2)
    unsupported("unsupported channel count " + std::to_string(channels));
  if (sample_rate < 8000)
    unsupported("sample rate below 8000 Hz: " + std::to_string(sample_rate));

  WavData out;
  out.sample_rate = sample_rate;
  out.channels = channels;
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data.size() / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(read_u16(data, 2 * i));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data.size() / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] = std::bit_cast<float>(read_u32(data, 4 * i));
  } else {
    unsupported("format tag " + std::to_string(format) + " with " +
                std::to_string(bits) + " bits per sample");
  }
  out.samples.resize(out.samples.size() - out.samples.size() % channels);
  return out;
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + path.string());
  return decode_wav(bytes);
}

std::vector<double> downmix(const WavData& wav) {
  if (wav.channels == 1) return wav.samples;
  const auto ch = static_cast<std::size_t>(wav.channels);
  std::vector<double> mono(wav.samples.size() / ch);
  for (std::size_t f = 0; f < mono.size(); ++f) {
    double sum = 0.0;
    for (std::size_t c = 0; c < ch; ++c) sum += wav.samples[f * ch + c];
    mono[f] = sum / static_cast<double>(ch);
  }
  return mono;
}

std::vector<unsigned char> encode_wav(std::span<const double> interleaved,
                                      int channels, int sample_rate,
                                      WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::Pcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size =
      static_cast<std::uint32_t>(interleaved.size() * bytes_per_sample);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate * channels * bytes_per_sample));
  put_u16(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  put_tag(out, "data");
  put_u32(out, data_size);
  for (const double s : interleaved) {
    if (pcm) {
      const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const double> mono,
               int sample_rate, WavEncoding encoding) {
  const auto bytes = encode_wav(mono, 1, sample_rate, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace timbre
