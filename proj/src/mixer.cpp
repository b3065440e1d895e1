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

#include "sfpro/mixer.hpp"

#include <algorithm>
#include <cmath>

#include "sfpro/common.hpp"

namespace sfpro {

double signal_energy(const Waveform& w) {
  double e = 0.0;
  for (double v : w.samples) e += v * v;
  return e;
}

MixResult mix_at_snr(const Waveform& target, const Waveform& interferer,
                     double snr_db) {
  SFPRO_CHECK_ARG(target.sample_rate_hz == interferer.sample_rate_hz,
                  "mix_at_snr: sample-rate mismatch");
  const size_t len = std::min(target.samples.size(), interferer.samples.size());
  SFPRO_CHECK_ARG(len >= 1, "mix_at_snr: empty input");

  double e_target = 0.0, e_interferer = 0.0;
  for (size_t i = 0; i < len; ++i) {
    e_target += target.samples[i] * target.samples[i];
    e_interferer += interferer.samples[i] * interferer.samples[i];
  }
  SFPRO_CHECK_ARG(e_target > 0.0, "mix_at_snr: zero-energy target");
  SFPRO_CHECK_ARG(e_interferer > 0.0, "mix_at_snr: zero-energy interferer");

  const double gain =
      std::sqrt(e_target / (e_interferer * std::pow(10.0, snr_db / 10.0)));

  MixResult r;
  r.gain = gain;
  r.mixture.sample_rate_hz = target.sample_rate_hz;
  r.scaled_interferer.sample_rate_hz = target.sample_rate_hz;
  r.target.sample_rate_hz = target.sample_rate_hz;
  r.mixture.samples.resize(len);
  r.scaled_interferer.samples.resize(len);
  r.target.samples.resize(len);
  for (size_t i = 0; i < len; ++i) {
    const double s = gain * interferer.samples[i];
    const double m = target.samples[i] + s;
    r.scaled_interferer.samples[i] = s;
    r.mixture.samples[i] = m;
    r.target.samples[i] = m - s;
  }
  return r;
}

}  // namespace sfpro
