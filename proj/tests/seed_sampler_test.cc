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

#include "mtpref/seed_sampler.h"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.h"

namespace mtpref {
namespace {

using ::mtpref::testing::MakeConversation;
using ::mtpref::testing::MakePair;
using ::mtpref::testing::TempDir;

TEST(SampleSeedTest, SingleTurnForced) {
  Rng rng(0);
  const Conversation c = MakeConversation(1);
  for (int i = 0; i < 10; ++i) {
    const SeedContext s = SampleSeed(c, rng);
    EXPECT_EQ(s.sampled_h, 1u);
    EXPECT_EQ(s.prefix, c);
    EXPECT_EQ(s.origin_total_turns, 1u);
  }
}

TEST(SampleSeedTest, ReferenceDrawH4Seed42) {
  // Frozen from a reference run of mt19937_64 seeded with 42.
  Rng rng(42);
  const SeedContext s = SampleSeed(MakeConversation(4), rng);
  EXPECT_EQ(s.sampled_h, 3u);
  EXPECT_EQ(s.prefix.size(), 3u);
}

TEST(SampleSeedTest, PrefixIsTruePrefix) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const Conversation c = testing::RandomConversation(rng, 6);
    const SeedContext s = SampleSeed(c, rng);
    EXPECT_GE(s.sampled_h, 1u);
    EXPECT_LE(s.sampled_h, c.size());
    EXPECT_EQ(s.prefix.size(), s.sampled_h);
    EXPECT_TRUE(s.prefix.IsPrefixOf(c));
  }
}

TEST(SampleSeedTest, UniformWithinThreeSigma) {
  Rng rng(123);
  const Conversation c = MakeConversation(5);
  std::array<int, 5> counts{};
  for (int i = 0; i < 10000; ++i) ++counts[SampleSeed(c, rng).sampled_h - 1];
  const double sigma = std::sqrt(10000 * 0.2 * 0.8);
  double chi2 = 0;
  for (int k : counts) {
    EXPECT_LT(std::abs(k - 2000), 3 * sigma);
    chi2 += (k - 2000.0) * (k - 2000.0) / 2000.0;
  }
  // Survival function of chi-square with 4 degrees of freedom.
  EXPECT_GT(std::exp(-chi2 / 2) * (1 + chi2 / 2), 0.001);
}

TEST(SampleSeedTest, InvalidConversationRejected) {
  Rng rng(0);
  EXPECT_THROW(SampleSeed(Conversation("x", {{"u", ""}}), rng),
               std::invalid_argument);
}

TEST(BuildSeedSetTest, OnePairOneSeed) {
  std::vector<PreferencePair> pairs = {MakePair(3, "p")};
  const auto seeds = BuildSeedSet(pairs, {});
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_EQ(seeds[0].origin_id, "p");
  EXPECT_EQ(seeds[0].seed_id, "p#0");
  EXPECT_TRUE(seeds[0].prefix.IsPrefixOf(pairs[0].chosen));
}

TEST(BuildSeedSetTest, SixTurnPairContributesNothing) {
  std::vector<PreferencePair> pairs = {MakePair(6, "long")};
  SeedSetStats stats;
  EXPECT_TRUE(BuildSeedSet(pairs, {}, &stats).empty());
  EXPECT_EQ(stats.filter.too_many_turns, 1u);
  EXPECT_EQ(stats.seeds, 0u);
}

TEST(BuildSeedSetTest, TwoSeedsPerConversation) {
  std::vector<PreferencePair> pairs;
  for (int i = 0; i < 50; ++i) {
    pairs.push_back(MakePair(1 + i % 5, "p" + std::to_string(i)));
  }
  SamplerConfig cfg;
  cfg.seeds_per_conversation = 2;
  cfg.rng_seed = 9;
  const auto seeds = BuildSeedSet(pairs, cfg);
  ASSERT_EQ(seeds.size(), 100u);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const PreferencePair& origin = pairs[i / 2];
    EXPECT_EQ(seeds[i].seed_id, origin.id + "#" + std::to_string(i % 2));
    EXPECT_TRUE(seeds[i].prefix.SameTurns(
        origin.chosen.Prefix(seeds[i].sampled_h)));
    EXPECT_EQ(seeds[i].origin_total_turns, origin.chosen.size());
  }
}

TEST(BuildSeedSetTest, MalformedPairsSkippedAndCounted) {
  PreferencePair bad = MakePair(2, "bad");
  bad.chosen = Conversation("c", {{"", "a"}});
  std::vector<PreferencePair> pairs = {bad, MakePair(2, "ok")};
  SeedSetStats stats;
  const auto seeds = BuildSeedSet(pairs, {}, &stats);
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_EQ(seeds[0].origin_id, "ok");
  EXPECT_EQ(stats.filter.malformed, 1u);
}

TEST(BuildSeedSetTest, Reproducible) {
  TempDir dir;
  std::vector<PreferencePair> pairs;
  for (int i = 0; i < 40; ++i) {
    pairs.push_back(MakePair(1 + i % 5, "p" + std::to_string(i)));
  }
  SamplerConfig cfg;
  cfg.rng_seed = 31337;
  const auto a = BuildSeedSet(pairs, cfg);
  const auto b = BuildSeedSet(pairs, cfg);
  EXPECT_EQ(a, b);
  WriteSeedsJsonl(dir / "a.jsonl", a);
  WriteSeedsJsonl(dir / "b.jsonl", b);
  EXPECT_EQ(testing::ReadFile(dir / "a.jsonl"),
            testing::ReadFile(dir / "b.jsonl"));
  cfg.rng_seed = 31338;
  std::size_t differing = 0;
  const auto c = BuildSeedSet(pairs, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    differing += a[i].sampled_h != c[i].sampled_h;
  }
  EXPECT_GT(differing, 0u);
}

TEST(BuildSeedSetTest, ZeroBoundsRejected) {
  std::vector<PreferencePair> pairs;
  SamplerConfig cfg;
  cfg.seeds_per_conversation = 0;
  EXPECT_THROW(BuildSeedSet(pairs, cfg), std::invalid_argument);
  cfg = {};
  cfg.max_turns = 0;
  EXPECT_THROW(BuildSeedSet(pairs, cfg), std::invalid_argument);
}

TEST(SeedJsonlTest, RoundTripAndSchema) {
  TempDir dir;
  std::vector<PreferencePair> pairs;
  for (int i = 0; i < 10; ++i) {
    pairs.push_back(MakePair(1 + i % 5, "p" + std::to_string(i)));
  }
  const auto seeds = BuildSeedSet(pairs, {});
  WriteSeedsJsonl(dir / "s.jsonl", seeds);
  auto read = ReadSeedsJsonl(dir / "s.jsonl");
  EXPECT_TRUE(read.errors.empty());
  EXPECT_EQ(read.records, seeds);
  const Json first = SeedToJson(seeds[0]);
  EXPECT_EQ(first.begin().key(), "origin_id");
  EXPECT_TRUE(first["prefix"].is_array());

  Json bad = first;
  bad["sampled_h"] = 0;
  EXPECT_THROW(SeedFromJson(bad), SchemaError);
  bad = first;
  bad["sampled_h"] = seeds[0].sampled_h + 1;
  EXPECT_THROW(SeedFromJson(bad), SchemaError);
}

}  // namespace
}  // namespace mtpref
