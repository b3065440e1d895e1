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

#ifndef SFPRO_RNG_HPP_
#define SFPRO_RNG_HPP_

#include <array>
#include <cstdint>

namespace sfpro {

// xoshiro256** seeded via splitmix64. Self-contained so that streams are
// bit-stable across platforms and the full state can be checkpointed.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), n > 0.
  int64_t uniform_int(int64_t n);

  // Derives an independent stream; deterministic in (current seed, tag).
  Rng fork(uint64_t tag) const;

  std::array<uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

 private:
  Rng() = default;
  std::array<uint64_t, 4> s_{};
};

}  // namespace sfpro

#endif  // SFPRO_RNG_HPP_
