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

// Multi-turn Best-of-N inference and swap-order pairwise judging.
//
// A BoN conversation starts from a prompt. At each turn the assistant samples
// N candidates, the reward model scores the whole conversation-so-far with
// each candidate appended, and the argmax candidate (lowest index on ties)
// continues the conversation. Later user turns come from the user simulator.
//
// Two conversations are compared by judging them twice with their positions
// exchanged; the winrate is the mean over valid judge calls, so a split pair
// contributes 0.5 and a judge that always names the first position scores
// exactly 0.5.

#ifndef MTPREF_BON_EVAL_H_
#define MTPREF_BON_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtpref/conversation.h"
#include "mtpref/expected.h"
#include "mtpref/gateway.h"
#include "mtpref/jsonl.h"
#include "mtpref/prompts.h"
#include "mtpref/reward_model.h"

namespace mtpref {

using Scorer = std::function<double(const Conversation&)>;

// Scores with a linear reward model. The featurizer must match the params.
Scorer MakeRewardScorer(std::shared_ptr<const Featurizer> featurizer,
                        RewardModelParams params);

struct BonConfig {
  std::size_t n_candidates = 4;
  std::size_t horizon = 3;
  // Greedy decoding: one candidate at temperature 0.
  bool greedy = false;
  // Reuse the first conversation's simulated user turns for the second one
  // when comparing, instead of simulating each independently.
  bool shared_user = false;
  SamplingConfig assistant_sampling{.temperature = 0.7};
  SamplingConfig user_sampling{.temperature = 0.7};
  SamplingConfig judge_sampling{.temperature = 0.0};
  std::size_t max_in_flight = 4;
  std::size_t max_parallel_prompts = 1;
  // Null means PromptSet::Embedded().
  std::shared_ptr<const PromptSet> prompts;
};

// Throws std::invalid_argument.
void ValidateBonConfig(const BonConfig& cfg);

// cfg with greedy semantics applied: N = 1 and temperature 0 when cfg.greedy.
BonConfig EffectiveBonConfig(const BonConfig& cfg);

class BonTurnFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BonTurnResult {
  std::string chosen_text;
  std::size_t chosen_index = 0;
  std::vector<std::string> candidates;       // empty string for failures
  std::vector<std::optional<double>> scores;  // nullopt for failures
};

// Index of the largest score, lowest index on ties; nullopt entries are
// skipped. Returns nullopt if every entry is nullopt.
std::optional<std::size_t> ArgmaxLowestIndex(
    std::span<const std::optional<double>> scores);

// Samples N candidates for `user_utterance` (candidate i uses a seed derived
// from `salt` and i), scores context + (utterance, candidate) and keeps the
// argmax. Throws BonTurnFailure if every candidate fails.
BonTurnResult BonTurn(const Conversation& context,
                      std::string_view user_utterance, const Scorer& scorer,
                      ChatBackend& assistant_backend, const BonConfig& cfg,
                      std::uint64_t salt);

struct BonBackends {
  ChatBackend& user;
  ChatBackend& assistant;
};

enum class BonAbandonReason { kUserParseFailure, kBackendFailure };

struct BonAbandon {
  BonAbandonReason reason;
  std::string detail;
};

// Builds an H-turn conversation: turn 1's user text is `prompt`; later user
// texts come from the user simulator (one re-sample on a parse failure), or
// from `forced_user_turns[t - 2]` when provided.
Expected<Conversation, BonAbandon> BonConversation(
    std::string_view prompt, const Scorer& scorer, BonBackends backends,
    const BonConfig& cfg, std::uint64_t salt,
    std::span<const std::string> forced_user_turns = {});

struct VerdictPair {
  Verdict original = Verdict::kInvalid;          // conv_a shown as A
  Verdict swapped_remapped = Verdict::kInvalid;  // conv_a shown as B, remapped

  friend bool operator==(const VerdictPair&, const VerdictPair&) = default;
};

// Maps a verdict from the swapped presentation back to conv_a/conv_b
// identity. An involution.
Verdict RemapSwapped(Verdict v);

// Judges (a, b) and then (b, a). A failed call yields an invalid verdict.
VerdictPair JudgePair(const Conversation& conv_a, const Conversation& conv_b,
                      ChatBackend& judge, const SamplingConfig& sampling,
                      const PromptSet& prompts = PromptSet::Embedded());

struct WinrateReport {
  // Pair-level buckets: comparisons = wins_a + wins_b + ties_from_split +
  // invalid, where `invalid` counts pairs with at least one invalid call.
  std::size_t comparisons = 0;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties_from_split = 0;
  std::size_t invalid = 0;
  // Call-level counts behind the winrate.
  std::size_t calls_favoring_a = 0;
  std::size_t calls_favoring_b = 0;
  std::size_t invalid_calls = 0;
  // Mean over valid calls of [call favors A]; nullopt with no valid calls.
  std::optional<double> winrate_a;
};

WinrateReport Winrate(std::span<const VerdictPair> verdicts);
Json WinrateReportToJson(const WinrateReport& report);

struct PromptItem {
  std::string id;
  std::string text;
};

// One side of a comparison: a reward-model scorer or greedy decoding.
struct BonSide {
  std::string name;
  Scorer scorer;
  bool greedy = false;

  static BonSide Greedy();
};

struct ComparisonRecord {
  std::string prompt_id;
  Conversation conv_a;
  Conversation conv_b;
  VerdictPair verdicts;
};

Json ComparisonRecordToJson(const ComparisonRecord& record);

struct ComparisonResult {
  WinrateReport report;
  std::vector<ComparisonRecord> records;  // prompt order, completed only
  std::size_t abandoned = 0;
};

// For every prompt builds one BoN conversation per side from the same prompt
// and sampling salt, judges the pair in both orders and aggregates. Prompts
// whose conversations are abandoned are excluded and counted.
ComparisonResult CompareRms(std::span<const PromptItem> prompts,
                            const BonSide& side_a, const BonSide& side_b,
                            BonBackends backends, ChatBackend& judge,
                            const BonConfig& cfg);

}  // namespace mtpref

#endif  // MTPREF_BON_EVAL_H_
