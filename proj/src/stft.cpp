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

#include "sfpro/stft.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "sfpro/common.hpp"
#include "sfpro/kernels.hpp"

namespace sfpro {

void StftConfig::validate() const {
  SFPRO_CHECK_ARG(fft_size >= 2 && fft_size % 2 == 0,
                  "stft: fft_size must be even and >= 2");
  SFPRO_CHECK_ARG(hop >= 1 && fft_size % hop == 0,
                  "stft: hop must divide fft_size");
  SFPRO_CHECK_ARG(hop <= fft_size / 2, "stft: hop must be <= fft_size/2");
}

ComplexSpectrogram ComplexSpectrogram::zeros(int64_t n, int64_t k) {
  ComplexSpectrogram s;
  s.frames = n;
  s.bins = k;
  s.re.assign(n * k, 0.0);
  s.im.assign(n * k, 0.0);
  return s;
}

std::vector<double> hann_window(int64_t fft_size) {
  std::vector<double> w(fft_size);
  for (int64_t n = 0; n < fft_size; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / fft_size);
  return w;
}

const DftTables& dft_tables(int64_t fft_size) {
  static std::mutex mu;
  static std::map<int64_t, DftTables> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(fft_size);
  if (it == cache.end()) {
    DftTables t;
    t.fft_size = fft_size;
    t.bins = fft_size / 2 + 1;
    t.cos_t.resize(t.bins * fft_size);
    t.sin_t.resize(t.bins * fft_size);
    for (int64_t k = 0; k < t.bins; ++k) {
      for (int64_t n = 0; n < fft_size; ++n) {
        const double arg = 2.0 * M_PI * k * n / fft_size;
        t.cos_t[k * fft_size + n] = std::cos(arg);
        t.sin_t[k * fft_size + n] = std::sin(arg);
      }
    }
    t.window = hann_window(fft_size);
    it = cache.emplace(fft_size, std::move(t)).first;
  }
  return it->second;
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  const int64_t len = w.size();
  SFPRO_CHECK_ARG(len >= cfg.fft_size, "stft: signal shorter than one frame");
  const int64_t num_frames = cfg.num_frames(len);
  const int64_t bins = cfg.bins();
  auto s = ComplexSpectrogram::zeros(num_frames, bins);
  kernels::stft_forward(w.samples.data(), len, dft_tables(cfg.fft_size),
                        cfg.hop, num_frames, s.re.data(), s.im.data());
  return s;
}

Waveform istft(const ComplexSpectrogram& s, const StftConfig& cfg,
               int64_t out_length, int sample_rate_hz) {
  cfg.validate();
  SFPRO_CHECK_ARG(s.bins == cfg.bins(), "istft: bins != fft_size/2+1");
  SFPRO_CHECK_ARG(out_length >= 0, "istft: negative output length");
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(out_length, 0.0);
  kernels::istft_wola(s.re.data(), s.im.data(), s.frames,
                      dft_tables(cfg.fft_size), cfg.hop, w.samples.data(),
                      out_length);
  return w;
}

std::vector<double> magnitude(const ComplexSpectrogram& s) {
  std::vector<double> m(s.frames * s.bins);
  for (int64_t i = 0; i < s.frames * s.bins; ++i)
    m[i] = std::sqrt(s.re[i] * s.re[i] + s.im[i] * s.im[i]);
  return m;
}

void write_spectrogram_dump(const std::string& path,
                            const ComplexSpectrogram& s) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  SFPRO_CHECK(f.good(), "cannot open for writing: " + path);
  f.write("SFSPEC1", 7);
  const uint32_t n = static_cast<uint32_t>(s.frames);
  const uint32_t k = static_cast<uint32_t>(s.bins);
  uint8_t hdr[8];
  for (int i = 0; i < 4; ++i) hdr[i] = (n >> (8 * i)) & 0xff;
  for (int i = 0; i < 4; ++i) hdr[4 + i] = (k >> (8 * i)) & 0xff;
  f.write(reinterpret_cast<const char*>(hdr), 8);
  for (int64_t i = 0; i < s.frames * s.bins; ++i) {
    double pair[2] = {s.re[i], s.im[i]};
    f.write(reinterpret_cast<const char*>(pair), 16);
  }
  SFPRO_CHECK(f.good(), "write failed: " + path);
}

ComplexSpectrogram read_spectrogram_dump(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  SFPRO_CHECK(f.good(), "cannot open spectrogram dump: " + path);
  char magic[7];
  f.read(magic, 7);
  SFPRO_CHECK(f.gcount() == 7 && std::memcmp(magic, "SFSPEC1", 7) == 0,
              "not an SFSPEC1 dump: " + path);
  uint8_t hdr[8];
  f.read(reinterpret_cast<char*>(hdr), 8);
  SFPRO_CHECK(f.gcount() == 8, "truncated spectrogram dump: " + path);
  uint32_t n = 0, k = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<uint32_t>(hdr[i]) << (8 * i);
  for (int i = 0; i < 4; ++i) k |= static_cast<uint32_t>(hdr[4 + i]) << (8 * i);
  auto s = ComplexSpectrogram::zeros(n, k);
  for (int64_t i = 0; i < s.frames * s.bins; ++i) {
    double pair[2];
    f.read(reinterpret_cast<char*>(pair), 16);
    SFPRO_CHECK(f.gcount() == 16, "truncated spectrogram dump: " + path);
    s.re[i] = pair[0];
    s.im[i] = pair[1];
  }
  return s;
}

}  // namespace sfpro
