/*
 * Copyright 2026 The fpmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FPMIMO_RANDOM_HPP_
#define FPMIMO_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

#include "fpmimo/fp_emu.hpp"

namespace fpmimo {

using Rng = std::mt19937_64;

/// Independent generator for (seed, a, b). The key is hashed, so neighbouring
/// indices give unrelated streams and any work split sees the same numbers.
inline Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  const std::uint64_t key = mix64(mix64(seed) ^ mix64(a + 0x632be59bd9b4e019ULL) ^
                                  mix64(b + 0x8cb92ba72f3d8dd7ULL) * 3);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return Rng(seq);
}

/// Draws from CN(0, variance). Keeps the normal generator's cached second
/// value, so reuse one instance per stream.
class ComplexGaussian {
 public:
  Complex operator()(Rng& gen, double variance = 1.0) {
    const double scale = std::sqrt(variance / 2);
    const double re = nd_(gen);
    const double im = nd_(gen);
    return {scale * re, scale * im};
  }

 private:
  std::normal_distribution<double> nd_{0.0, 1.0};
};

}  // namespace fpmimo

#endif  // FPMIMO_RANDOM_HPP_
