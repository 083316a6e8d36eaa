#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 idva authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
//
//  splitmix64 generator with per-trial stream derivation, so experiment
//  output is bit-reproducible for a given seed regardless of run order.
//
//------------------------------------------------------------------------------

#include <cstdint>
#include <initializer_list>

namespace idva {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform index in [0, bound); bound must be positive.
  std::size_t next_index(std::size_t bound) {
    return static_cast<std::size_t>(next() % static_cast<std::uint64_t>(bound));
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for a (seed, salt...) combination.
inline SplitMix64 derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) {
  SplitMix64 mixer(seed);
  std::uint64_t state = mixer.next();
  for (std::uint64_t salt : salts) {
    SplitMix64 step(state ^ salt);
    state = step.next();
  }
  return SplitMix64(state);
}

}  // namespace idva
