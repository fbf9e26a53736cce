// Copyright 2026 The mtpref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic randomness. The generator is std::mt19937_64 and bounded
// draws use rejection sampling on its raw output, so sequences are identical
// across standard library implementations (std::uniform_int_distribution
// is not).

#ifndef MTPREF_RANDOM_H_
#define MTPREF_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace mtpref {

using Rng = std::mt19937_64;

inline constexpr std::string_view kRngAlgorithm = "mt19937_64+rejection";

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mixes `base` with each salt in order. Used to give every backend call its
// own reproducible sampling seed.
inline std::uint64_t DeriveSeed(std::uint64_t base,
                                std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = SplitMix64(base);
  for (std::uint64_t s : salts) h = SplitMix64(h ^ SplitMix64(s));
  return h;
}

// Uniform draw from {0, ..., n-1}. n must be positive.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Fisher-Yates shuffle driven by UniformIndex.
template <typename T>
void Shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Uniform real in [0, 1) with 53 bits of precision.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mtpref

#endif  // MTPREF_RANDOM_H_
