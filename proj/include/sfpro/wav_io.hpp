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

#ifndef SFPRO_WAV_IO_HPP_
#define SFPRO_WAV_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace sfpro {

// Mono audio; the time-domain currency of the whole pipeline.
struct Waveform {
  std::vector<double> samples;  // amplitudes, nominally in [-1, 1]
  int sample_rate_hz = 8000;

  int64_t size() const { return static_cast<int64_t>(samples.size()); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Reads a mono RIFF/WAVE file (PCM 16-bit or IEEE float-32).
// int16 samples are normalized by 1/32768. Distinct errors for: missing
// file, multi-channel input, unsupported encoding, truncated container.
Waveform read_wav(const std::string& path);

// Writes 16-bit PCM little-endian mono. Samples are clamped to [-1, 1]
// before quantization; round trip is exact to within 2^-15 per sample.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace sfpro

#endif  // SFPRO_WAV_IO_HPP_
