// Copyright 2026  sfpro authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfpro/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sfpro/common.hpp"

namespace sfpro {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  SFPRO_CHECK(in.good(), "cannot open wav file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
  const size_t n = bytes.size();

  SFPRO_CHECK(n >= 12, "truncated wav container: " + path);
  SFPRO_CHECK(std::memcmp(p, "RIFF", 4) == 0 && std::memcmp(p + 8, "WAVE", 4) == 0,
              "not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t off = 12;
  while (off + 8 <= n) {
    const char* id = reinterpret_cast<const char*>(p + off);
    const uint32_t chunk_len = read_u32(p + off + 4);
    const size_t body = off + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      SFPRO_CHECK(body + 16 <= n && chunk_len >= 16,
                  "truncated wav container: " + path);
      format = read_u16(p + body);
      channels = read_u16(p + body + 2);
      sample_rate = read_u32(p + body + 4);
      bits = read_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    // Chunks are word-aligned.
    off = body + chunk_len + (chunk_len & 1);
  }

  SFPRO_CHECK(have_fmt && data_off != 0, "truncated wav container: " + path);
  SFPRO_CHECK(data_off + data_len <= n, "truncated wav container: " + path);
  SFPRO_CHECK(channels == 1, "multi-channel unsupported: " + path);

  Waveform w;
  w.sample_rate_hz = static_cast<int>(sample_rate);
  if (format == kFormatPcm && bits == 16) {
    const size_t count = data_len / 2;
    w.samples.resize(count);
    for (size_t i = 0; i < count; ++i) {
      const int16_t v =
          static_cast<int16_t>(read_u16(p + data_off + 2 * i));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatIeeeFloat && bits == 32) {
    const size_t count = data_len / 4;
    w.samples.resize(count);
    for (size_t i = 0; i < count; ++i) {
      uint32_t u = read_u32(p + data_off + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      w.samples[i] = static_cast<double>(f);
    }
  } else {
    throw std::runtime_error("unsupported wav encoding (format " +
                             std::to_string(format) + ", " +
                             std::to_string(bits) + " bit): " + path);
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  for (double v : w.samples)
    SFPRO_CHECK(std::isfinite(v), "write_wav: non-finite sample");

  const uint32_t num_samples = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_len = num_samples * 2;

  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<uint32_t>(w.sample_rate_hz) * 2);  // byte rate
  put_u16(out, 2);                                            // block align
  put_u16(out, 16);
  out.append("data");
  put_u32(out, data_len);
  for (double v : w.samples) {
    const double clamped = std::clamp(v, -1.0, 1.0);
    long q = std::lround(clamped * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  SFPRO_CHECK(f.good(), "cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  SFPRO_CHECK(f.good(), "write failed: " + path);
}

}  // namespace sfpro
