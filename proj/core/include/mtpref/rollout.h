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

// Paired multi-turn rollouts with ephemeral instruction contrast.
//
// Starting from a seed prefix, a chosen and a rejected branch are grown for a
// fixed horizon. Every turn each branch gets its own simulated user utterance.
// The chosen branch's assistant answers that utterance directly. The rejected
// branch's assistant instead sees the instruction-contrast prompt, and only
// the parsed answer is stored: the modified instruction and the contrast
// prompt never enter the persisted conversation.

#ifndef MTPREF_ROLLOUT_H_
#define MTPREF_ROLLOUT_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtpref/conversation.h"
#include "mtpref/gateway.h"
#include "mtpref/jsonl.h"
#include "mtpref/prompts.h"
#include "mtpref/seed_sampler.h"

namespace mtpref {

struct RolloutConfig {
  std::size_t max_turns = 5;
  SamplingConfig user_sampling{.temperature = 0.7};
  SamplingConfig assistant_sampling{.temperature = 0.7};
  TokenBudget budget;
  // When set, a rollout stops before the first turn that would push either
  // branch over budget.max_tokens; it is emitted only if at least one turn
  // was appended.
  bool stop_at_budget = false;
  // Null means PromptSet::Embedded().
  std::shared_ptr<const PromptSet> prompts;
};

void ValidateRolloutConfig(const RolloutConfig& cfg);

enum class RolloutStatus {
  kComplete,
  kStoppedAtBudget,
  kAbandonedParseFailure,
  kAbandonedBackendFailure,
};

std::string_view RolloutStatusName(RolloutStatus status);

struct RolloutTurnRecord {
  std::string user_chosen;
  std::string assistant_chosen;
  std::string user_rejected;
  std::string modified_instruction_discarded;
  std::string assistant_rejected;
};

struct RolloutTrace {
  SeedContext seed;
  std::vector<RolloutTurnRecord> turns;
  RolloutStatus status = RolloutStatus::kComplete;
  std::string detail;
  std::size_t parse_retries = 0;
  // Simulated user utterances that repeat an earlier user turn of the same
  // branch verbatim.
  std::size_t repeated_user_turns = 0;
};

struct RolloutOutcome {
  std::optional<PreferencePair> pair;
  RolloutTrace trace;
  // The branches came out textually identical and the pair was dropped.
  bool dropped_identical = false;
};

// Never throws for backend or parse failures; those end the rollout with an
// abandoned status and no pair. Throws std::invalid_argument for an invalid
// seed or config.
RolloutOutcome RolloutPair(const SeedContext& seed, ChatBackend& user_backend,
                           ChatBackend& assistant_backend,
                           const RolloutConfig& cfg);

struct RolloutStats {
  std::size_t seeds = 0;
  std::size_t completed = 0;
  std::size_t stopped_at_budget = 0;
  std::size_t abandoned_parse = 0;
  std::size_t abandoned_backend = 0;
  std::size_t dropped_identical = 0;
  std::size_t parse_retries = 0;
  std::size_t repeated_user_turns = 0;

  std::size_t emitted() const { return completed + stopped_at_budget; }
};

struct RolloutDatasetResult {
  std::vector<PreferencePair> pairs;  // in seed order
  std::vector<RolloutTrace> traces;   // one per seed, in seed order
  RolloutStats stats;
};

// Runs RolloutPair over every seed with at most `max_parallel` rollouts in
// flight. Output is identical for any max_parallel given deterministic
// backends.
RolloutDatasetResult RolloutDataset(std::span<const SeedContext> seeds,
                                    ChatBackend& user_backend,
                                    ChatBackend& assistant_backend,
                                    const RolloutConfig& cfg,
                                    std::size_t max_parallel);

Json TraceToJson(const RolloutTrace& trace);
Json RolloutStatsToJson(const RolloutStats& stats);

}  // namespace mtpref

#endif  // MTPREF_ROLLOUT_H_
