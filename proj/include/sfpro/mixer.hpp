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

#ifndef SFPRO_MIXER_HPP_
#define SFPRO_MIXER_HPP_

#include "sfpro/wav_io.hpp"

namespace sfpro {

struct MixResult {
  Waveform mixture;
  Waveform scaled_interferer;
  // target[i] is computed as mixture[i] - scaled_interferer[i], so the
  // triple is exactly consistent at the bit level. It differs from the
  // caller's target by at most one rounding ulp per sample.
  Waveform target;
  double gain = 0.0;  // applied to the interferer
};

// Mixes target + g * interferer so that 10*log10(E_t / E_gi) = snr_db.
// Both sources are truncated to the shorter length first.
MixResult mix_at_snr(const Waveform& target, const Waveform& interferer,
                     double snr_db);

double signal_energy(const Waveform& w);

}  // namespace sfpro

#endif  // SFPRO_MIXER_HPP_
