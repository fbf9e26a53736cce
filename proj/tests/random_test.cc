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

#include "mtpref/random.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "mtpref/parallel.h"

namespace mtpref {
namespace {

TEST(RngTest, StandardGeneratorSequence) {
  // The 10000th output of a default-constructed mt19937_64 is fixed by the
  // C++ standard.
  Rng rng;
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ULL);
}

TEST(RngTest, UniformIndexInRange) {
  Rng rng(3);
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(UniformIndex(rng, n), n);
  }
}

TEST(RngTest, UniformIndexSequenceIsStable) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(UniformIndex(a, 13), UniformIndex(b, 13));
  }
}

TEST(RngTest, UniformUnitInRange) {
  Rng rng(9);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = UniformUnit(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(RngTest, ShuffleIsPermutation) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> v(UniformIndex(rng, 40));
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;
    Shuffle(std::span<int>(w), rng);
    std::vector<int> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, v);
  }
}

TEST(RngTest, DeriveSeedSeparatesSalts) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) {
      seen.insert(DeriveSeed(7, {a, b}));
    }
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(DeriveSeed(7, {1, 2}), DeriveSeed(7, {1, 2}));
  EXPECT_NE(DeriveSeed(7, {1, 2}), DeriveSeed(7, {2, 1}));
  EXPECT_NE(DeriveSeed(7, {1}), DeriveSeed(8, {1}));
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (std::size_t workers : {1u, 2u, 8u, 100u}) {
    std::vector<std::atomic<int>> hits(257);
    ParallelFor(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  ParallelFor(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelForTest, RespectsWorkerLimit) {
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  ParallelFor(64, 3, [&](std::size_t) {
    const int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    --active;
  });
  EXPECT_LE(peak.load(), 3);
}

TEST(ParallelForTest, RethrowsFirstError) {
  EXPECT_THROW(ParallelFor(100, 4,
                           [](std::size_t i) {
                             if (i == 17) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

}  // namespace
}  // namespace mtpref
