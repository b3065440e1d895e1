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

#ifndef SFPRO_STFT_HPP_
#define SFPRO_STFT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sfpro/wav_io.hpp"

namespace sfpro {

// Analysis/synthesis parameters. The window is a periodic Hann, which
// satisfies constant overlap-add at hop = fft_size / 2^k.
struct StftConfig {
  int64_t fft_size = 256;
  int64_t hop = 128;

  int64_t bins() const { return fft_size / 2 + 1; }
  // N = floor((len - fft_size)/hop) + 1; no implicit padding.
  int64_t num_frames(int64_t len) const {
    return (len - fft_size) / hop + 1;
  }
  void validate() const;
};

// One-sided complex STFT values, row-major by frame.
struct ComplexSpectrogram {
  int64_t frames = 0;
  int64_t bins = 0;
  std::vector<double> re;
  std::vector<double> im;

  static ComplexSpectrogram zeros(int64_t n, int64_t k);
  double& real(int64_t n, int64_t k) { return re[n * bins + k]; }
  double& imag(int64_t n, int64_t k) { return im[n * bins + k]; }
  double real(int64_t n, int64_t k) const { return re[n * bins + k]; }
  double imag(int64_t n, int64_t k) const { return im[n * bins + k]; }
};

// Periodic Hann window of the given length.
std::vector<double> hann_window(int64_t fft_size);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add synthesis with the same Hann window. The interior
// (all but the first and last fft_size - hop samples) of an stft round
// trip is reproduced to floating-point accuracy.
Waveform istft(const ComplexSpectrogram& s, const StftConfig& cfg,
               int64_t out_length, int sample_rate_hz = 8000);

// Elementwise modulus, row-major N x K.
std::vector<double> magnitude(const ComplexSpectrogram& s);

// "SFSPEC1" binary container: magic, N and K as u32 LE, then N*K (re, im)
// f64 LE pairs row-major by frame.
void write_spectrogram_dump(const std::string& path,
                            const ComplexSpectrogram& s);
ComplexSpectrogram read_spectrogram_dump(const std::string& path);

}  // namespace sfpro

#endif  // SFPRO_STFT_HPP_
