/*
 * Copyright 2026 The Hearthcast Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reproducible random numbers.
//
// Every stochastic step in the toolkit (dataset generation, train/test
// splitting, bootstrap resampling, feature subsampling) draws from SplitMix64
// so that results are identical across platforms and standard libraries.
// The std:: distributions are implementation-defined and are never used.
//
// SplitMix64 (Steele, Lea, Flood 2014):
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Streams are split by hashing (parent seed, index) through the same finalizer,
// see DeriveSeed().

#ifndef HEARTHCAST_RANDOM_HPP_
#define HEARTHCAST_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hearthcast {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t SplitMixFinalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of the index-th child stream of `seed`.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMixFinalize(SplitMixFinalize(seed + kSplitMixGamma) ^
                          (index * kSplitMixGamma + 0x632BE59BD9B4E019ULL));
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t Next() {
    state_ += kSplitMixGamma;
    return SplitMixFinalize(state_);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  constexpr double Uniform() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  constexpr double Uniform(double lo, double hi) {
    return lo + (hi - lo) * Uniform();
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t Below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const unsigned __int128 m =
          static_cast<unsigned __int128>(Next()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // Standard normal by Box-Muller; always consumes exactly two draws.
  double Normal() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // UniformRandomBitGenerator interface.
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
  constexpr std::uint64_t operator()() { return Next(); }

 private:
  std::uint64_t state_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_RANDOM_HPP_
