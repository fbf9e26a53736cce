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

#include "mtpref/rollout.h"

#include <algorithm>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mtpref/jsonl.h"
#include "test_support.h"

namespace mtpref {
namespace {

using ::mtpref::testing::MakeConversation;

SeedContext Seed(std::size_t h, const std::string& tag = "s",
                 std::size_t total = 5) {
  SeedContext s;
  s.prefix = MakeConversation(h, tag);
  s.origin_id = tag;
  s.origin_total_turns = std::max(h, total);
  s.sampled_h = h;
  s.seed_id = tag + "#0";
  return s;
}

std::string UserOut(const std::string& q) {
  return "Justification: keeps the thread going.\nQuestion: " + q;
}

std::string ContrastOut(const std::string& m, const std::string& a) {
  return "Modified Instruction: " + m + "\nAnswer: " + a;
}

RolloutConfig Config(std::size_t turns) {
  RolloutConfig cfg;
  cfg.max_turns = turns;
  return cfg;
}

struct Scripted {
  std::vector<std::string> user;
  std::vector<std::string> assistant;
};

Scripted TwoTurnScript() {
  return {{UserOut("c1?"), UserOut("r1?"), UserOut("c2?"), UserOut("r2?")},
          {"chosen one", ContrastOut("M-one", "R-one"), "chosen two",
           ContrastOut("M-two", "R-two")}};
}

RolloutOutcome RunScript(const SeedContext& seed, const Scripted& s,
                         std::size_t turns) {
  auto user = MockBackend::Script(s.user);
  auto assistant = MockBackend::Script(s.assistant);
  return RolloutPair(seed, *user, *assistant, Config(turns));
}

TEST(RolloutPairTest, ScriptedTwoTurns) {
  const SeedContext seed = Seed(2);
  const RolloutOutcome out = RunScript(seed, TwoTurnScript(), 2);
  ASSERT_TRUE(out.pair.has_value());
  const PreferencePair& p = *out.pair;
  EXPECT_EQ(p.chosen.size(), 4u);
  EXPECT_EQ(p.rejected.size(), 4u);
  EXPECT_EQ(p.shared_prefix_len, 2u);
  EXPECT_EQ(p.source, PairSource::kMusic);
  EXPECT_EQ(p.seed_id, "s#0");
  EXPECT_TRUE(seed.prefix.IsPrefixOf(p.chosen));
  EXPECT_TRUE(seed.prefix.IsPrefixOf(p.rejected));
  EXPECT_EQ(p.chosen[2], (Turn{"c1?", "chosen one"}));
  EXPECT_EQ(p.chosen[3], (Turn{"c2?", "chosen two"}));
  EXPECT_EQ(p.rejected[2], (Turn{"r1?", "R-one"}));
  EXPECT_EQ(p.rejected[3], (Turn{"r2?", "R-two"}));
  EXPECT_EQ(ValidatePair(p), std::nullopt);
  EXPECT_EQ(out.trace.status, RolloutStatus::kComplete);
  ASSERT_EQ(out.trace.turns.size(), 2u);
  EXPECT_EQ(out.trace.turns[0].modified_instruction_discarded, "M-one");
}

TEST(RolloutPairTest, ModifiedInstructionNeverPersisted) {
  const RolloutOutcome out = RunScript(Seed(1), TwoTurnScript(), 2);
  ASSERT_TRUE(out.pair.has_value());
  const std::string dumped = PairToJson(*out.pair).dump();
  EXPECT_EQ(dumped.find("M-one"), std::string::npos);
  EXPECT_EQ(dumped.find("M-two"), std::string::npos);
  EXPECT_EQ(dumped.find("Modified Instruction"), std::string::npos);
  EXPECT_EQ(dumped.find("Pretend you are"), std::string::npos);
  EXPECT_NE(dumped.find("R-one"), std::string::npos);
  EXPECT_NE(dumped.find("r1?"), std::string::npos);
}

TEST(RolloutPairTest, OneTurnWithMinimalMocks) {
  auto user = MockBackend::Script({UserOut("hello?")}, true);
  auto assistant = MockBackend::Custom(
      [](std::span<const ChatMessage> m, auto, auto) -> std::string {
        return "Answer: echo: " + m.back().content.substr(0, 12);
      });
  const RolloutOutcome out =
      RolloutPair(Seed(3), *user, *assistant, Config(1));
  ASSERT_TRUE(out.pair.has_value());
  EXPECT_EQ(out.pair->chosen.size(), 4u);
  EXPECT_EQ(out.pair->rejected.size(), 4u);
}

TEST(RolloutPairTest, BranchIndependence) {
  const SeedContext seed = Seed(2);
  const Scripted base = TwoTurnScript();
  const RolloutOutcome ref = RunScript(seed, base, 2);

  Scripted rej = base;
  rej.user[1] = UserOut("different r1?");
  rej.assistant[3] = ContrastOut("X", "other R-two");
  const RolloutOutcome a = RunScript(seed, rej, 2);
  EXPECT_EQ(a.pair->chosen, ref.pair->chosen);
  EXPECT_NE(a.pair->rejected, ref.pair->rejected);

  Scripted cho = base;
  cho.user[2] = UserOut("different c2?");
  cho.assistant[0] = "other chosen one";
  const RolloutOutcome b = RunScript(seed, cho, 2);
  EXPECT_EQ(b.pair->rejected, ref.pair->rejected);
  EXPECT_NE(b.pair->chosen, ref.pair->chosen);
}

TEST(RolloutPairTest, BranchesGetSeparateUserCalls) {
  std::mutex mu;
  std::vector<std::uint64_t> seeds;
  auto user = MockBackend::Custom(
      [&](auto, const SamplingConfig& s, auto) -> std::string {
        std::lock_guard<std::mutex> lock(mu);
        seeds.push_back(*s.seed);
        return UserOut("same question?");
      });
  auto assistant = MockBackend::Script(
      {"direct", ContrastOut("m", "contrast")}, true);
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(3));
  ASSERT_TRUE(out.pair.has_value());
  ASSERT_EQ(seeds.size(), 6u);
  EXPECT_EQ(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size(), 6u);
}

TEST(RolloutPairTest, ContrastOnlyOnRejectedBranch) {
  std::mutex mu;
  std::vector<std::vector<ChatMessage>> calls;
  auto assistant = MockBackend::Custom(
      [&](std::span<const ChatMessage> m, const SamplingConfig& s, auto) {
        {
          std::lock_guard<std::mutex> lock(mu);
          calls.emplace_back(m.begin(), m.end());
        }
        return TemplateMockReply(m, s);
      });
  auto user = MockBackend::Template();
  const RolloutOutcome out =
      RolloutPair(Seed(2, "yeast"), *user, *assistant, Config(2));
  ASSERT_TRUE(out.pair.has_value());
  ASSERT_EQ(calls.size(), 4u);
  for (int i : {0, 2}) {
    EXPECT_GT(calls[i].size(), 1u);
    for (const ChatMessage& m : calls[i]) {
      EXPECT_EQ(m.content.find(kContrastMarker), std::string::npos);
    }
  }
  for (int i : {1, 3}) {
    ASSERT_EQ(calls[i].size(), 1u);
    EXPECT_NE(calls[i][0].content.find(kContrastMarker), std::string::npos);
  }
}

TEST(RolloutPairTest, ParseFailureResampledOnce) {
  auto user = MockBackend::Script(
      {"no marker", UserOut("c1?"), UserOut("r1?")});
  auto assistant = MockBackend::Script({"a", ContrastOut("m", "r")});
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(1));
  ASSERT_TRUE(out.pair.has_value());
  EXPECT_EQ(out.trace.parse_retries, 1u);
  EXPECT_EQ(out.pair->chosen[1].user, "c1?");
}

TEST(RolloutPairTest, SecondParseFailureAbandons) {
  auto user = MockBackend::Script({"junk", "Question:   "});
  auto assistant = MockBackend::Script({"a"}, true);
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(1));
  EXPECT_FALSE(out.pair.has_value());
  EXPECT_EQ(out.trace.status, RolloutStatus::kAbandonedParseFailure);

  auto user2 = MockBackend::Script({UserOut("c?"), UserOut("r?")});
  auto bad_contrast = MockBackend::Script({"a", "no answer", "still none"});
  const RolloutOutcome out2 =
      RolloutPair(Seed(1), *user2, *bad_contrast, Config(1));
  EXPECT_FALSE(out2.pair.has_value());
  EXPECT_EQ(out2.trace.status, RolloutStatus::kAbandonedParseFailure);
}

TEST(RolloutPairTest, BackendFailureAbandons) {
  auto user = MockBackend::Script(
      {UserOut("c?"), std::string(MockBackend::kFailPermanent)});
  auto assistant = MockBackend::Script({"a"}, true);
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(1));
  EXPECT_FALSE(out.pair.has_value());
  EXPECT_EQ(out.trace.status, RolloutStatus::kAbandonedBackendFailure);
}

TEST(RolloutPairTest, IdenticalBranchesDropped) {
  auto user = MockBackend::Script({UserOut("same?")}, true);
  auto assistant = MockBackend::Script({"same", "Answer: same"}, true);
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(2));
  EXPECT_FALSE(out.pair.has_value());
  EXPECT_TRUE(out.dropped_identical);
}

TEST(RolloutPairTest, BudgetStop) {
  auto user = MockBackend::Script({UserOut("q?")}, true);
  auto assistant =
      MockBackend::Script({"one two three", ContrastOut("m", "x y")}, true);
  RolloutConfig cfg = Config(5);
  cfg.stop_at_budget = true;
  // Prefix "s u0" / "s a0" is 4 tokens; each chosen turn adds 4.
  cfg.budget.max_tokens = 12;
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, cfg);
  ASSERT_TRUE(out.pair.has_value());
  EXPECT_EQ(out.trace.status, RolloutStatus::kStoppedAtBudget);
  EXPECT_EQ(out.pair->chosen.size(), 3u);
  EXPECT_LE(CountTokens(out.pair->chosen, cfg.budget), 12u);

  cfg.budget.max_tokens = 5;
  const RolloutOutcome none = RolloutPair(Seed(1), *user, *assistant, cfg);
  EXPECT_FALSE(none.pair.has_value());
}

TEST(RolloutPairTest, RepeatedUserTurnsCounted) {
  auto user = MockBackend::Script({UserOut("s u0")}, true);
  auto assistant = MockBackend::Script({"a", ContrastOut("m", "r")}, true);
  const RolloutOutcome out = RolloutPair(Seed(1), *user, *assistant, Config(2));
  ASSERT_TRUE(out.pair.has_value());
  EXPECT_EQ(out.trace.repeated_user_turns, 4u);
}

TEST(RolloutPairTest, InvalidInputsThrow) {
  auto user = MockBackend::Template();
  auto assistant = MockBackend::Template();
  SeedContext bad = Seed(2);
  bad.sampled_h = 3;
  EXPECT_THROW(RolloutPair(bad, *user, *assistant, Config(1)),
               std::invalid_argument);
  EXPECT_THROW(RolloutPair(Seed(1), *user, *assistant, Config(0)),
               std::invalid_argument);
}

// Fails to parse on every user-simulator call whose transcript mentions
// `poisoned`; otherwise behaves like the template mock.
std::unique_ptr<MockBackend> PoisonedUser(const std::string& poisoned) {
  return MockBackend::Custom(
      [poisoned](std::span<const ChatMessage> m, const SamplingConfig& s,
                 auto) {
        if (m.back().content.find(poisoned) != std::string::npos) {
          return std::string("I refuse to follow the format.");
        }
        return TemplateMockReply(m, s);
      });
}

TEST(RolloutDatasetTest, TenSeedsAllSucceed) {
  std::vector<SeedContext> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(Seed(1 + i % 3, "t" + std::to_string(i)));
  auto user = MockBackend::Template();
  auto assistant = MockBackend::Template();
  const auto r = RolloutDataset(seeds, *user, *assistant, Config(2), 4);
  EXPECT_EQ(r.pairs.size(), 10u);
  EXPECT_EQ(r.stats.completed, 10u);
  EXPECT_EQ(r.stats.abandoned_parse + r.stats.abandoned_backend, 0u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(r.pairs[i].seed_id, seeds[i].seed_id);
  }
}

TEST(RolloutDatasetTest, OneSeedAbandonedOnParseFailure) {
  std::vector<SeedContext> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(Seed(2, "t" + std::to_string(i)));
  auto user = PoisonedUser("t3 u0");
  auto assistant = MockBackend::Template();
  const auto r = RolloutDataset(seeds, *user, *assistant, Config(2), 3);
  EXPECT_EQ(r.pairs.size(), 9u);
  EXPECT_EQ(r.stats.abandoned_parse, 1u);
  EXPECT_EQ(r.traces[3].status, RolloutStatus::kAbandonedParseFailure);
  EXPECT_EQ(r.traces.size(), 10u);
  EXPECT_EQ(RolloutStatsToJson(r.stats)["abandoned_parse"], 1);
}

TEST(RolloutDatasetTest, ParallelismDoesNotChangeOutput) {
  std::vector<SeedContext> seeds;
  for (int i = 0; i < 12; ++i) seeds.push_back(Seed(1 + i % 4, "p" + std::to_string(i)));
  auto user = MockBackend::Template();
  auto assistant = MockBackend::Template();
  RolloutConfig cfg = Config(3);
  cfg.user_sampling.seed = 99;
  cfg.assistant_sampling.seed = 99;
  const auto serial = RolloutDataset(seeds, *user, *assistant, cfg, 1);
  const auto parallel = RolloutDataset(seeds, *user, *assistant, cfg, 8);
  EXPECT_EQ(serial.pairs, parallel.pairs);
  EXPECT_THROW(RolloutDataset(seeds, *user, *assistant, cfg, 0),
               std::invalid_argument);
}

TEST(RolloutDatasetTest, StructureHoldsForRandomSeeds) {
  Rng rng(4);
  std::vector<SeedContext> seeds;
  for (int i = 0; i < 30; ++i) {
    const Conversation c =
        testing::RandomConversation(rng, 5).WithId("o" + std::to_string(i));
    SeedContext s = SampleSeed(c, rng);
    s.seed_id = c.id() + "#0";
    seeds.push_back(s);
  }
  auto user = MockBackend::Template();
  auto assistant = MockBackend::Template();
  const std::size_t T = 1 + UniformIndex(rng, 4);
  const auto r = RolloutDataset(seeds, *user, *assistant, Config(T), 4);
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    const RolloutTrace& trace = r.traces[i];
    if (trace.status == RolloutStatus::kComplete) {
      EXPECT_EQ(trace.turns.size(), T);
    }
  }
  for (const PreferencePair& p : r.pairs) {
    EXPECT_EQ(p.chosen.size(), p.shared_prefix_len + T);
    EXPECT_EQ(p.rejected.size(), p.shared_prefix_len + T);
    EXPECT_EQ(ValidatePair(p), std::nullopt);
  }
}

TEST(TraceJsonTest, Fields) {
  const RolloutOutcome out = RunScript(Seed(1), TwoTurnScript(), 2);
  const Json j = TraceToJson(out.trace);
  EXPECT_EQ(j["status"], "complete");
  EXPECT_EQ(j["turns"].size(), 2u);
  EXPECT_EQ(j["turns"][1]["modified_instruction_discarded"], "M-two");
}

}  // namespace
}  // namespace mtpref
