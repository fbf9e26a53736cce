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
#include <stdexcept>

#include "mtpref/parallel.h"
#include "mtpref/random.h"
#include "text_util.h"

namespace mtpref {
namespace {

enum Branch : std::uint64_t { kChosen = 1, kRejected = 2 };
enum CallKind : std::uint64_t { kUserCall = 1, kAssistantCall = 2 };

// Ends a rollout early; caught inside RolloutPair.
struct Abandon {
  RolloutStatus status;
  std::string detail;
};

class RolloutRunner {
 public:
  RolloutRunner(const SeedContext& seed, ChatBackend& user,
                ChatBackend& assistant, const RolloutConfig& cfg)
      : seed_(seed),
        user_(user),
        assistant_(assistant),
        cfg_(cfg),
        prompts_(cfg.prompts ? *cfg.prompts : PromptSet::Embedded()),
        seed_salt_(internal::Fnv1a64(seed.seed_id.empty() ? seed.origin_id
                                                          : seed.seed_id)) {}

  RolloutOutcome Run() {
    RolloutOutcome outcome;
    outcome.trace.seed = seed_;
    Conversation chosen = seed_.prefix;
    Conversation rejected = seed_.prefix;
    try {
      for (std::size_t t = 1; t <= cfg_.max_turns; ++t) {
        RolloutTurnRecord record;
        record.user_chosen = SimulateUser(chosen, t, kChosen, outcome.trace);
        record.user_rejected =
            SimulateUser(rejected, t, kRejected, outcome.trace);
        record.assistant_chosen = AnswerDirectly(chosen, record.user_chosen, t);
        ContrastOutput contrast =
            AnswerWithContrast(rejected, record.user_rejected, t,
                               outcome.trace);
        record.assistant_rejected = std::move(contrast.answer);
        record.modified_instruction_discarded =
            std::move(contrast.modified_instruction);

        Turn chosen_turn{record.user_chosen, record.assistant_chosen};
        Turn rejected_turn{record.user_rejected, record.assistant_rejected};
        if (cfg_.stop_at_budget &&
            (CountTokens(chosen.Appended(chosen_turn), cfg_.budget) >
                 cfg_.budget.max_tokens ||
             CountTokens(rejected.Appended(rejected_turn), cfg_.budget) >
                 cfg_.budget.max_tokens)) {
          outcome.trace.status = RolloutStatus::kStoppedAtBudget;
          outcome.trace.detail = "budget reached before turn " +
                                 std::to_string(t);
          break;
        }
        CountRepeat(chosen, record.user_chosen, outcome.trace);
        CountRepeat(rejected, record.user_rejected, outcome.trace);
        chosen = chosen.Appended(std::move(chosen_turn));
        rejected = rejected.Appended(std::move(rejected_turn));
        outcome.trace.turns.push_back(std::move(record));
      }
    } catch (const Abandon& abandon) {
      outcome.trace.status = abandon.status;
      outcome.trace.detail = abandon.detail;
      return outcome;
    }

    if (outcome.trace.turns.empty()) return outcome;
    if (chosen.SameTurns(rejected)) {
      outcome.dropped_identical = true;
      return outcome;
    }
    PreferencePair pair;
    pair.id = "music:" + (seed_.seed_id.empty() ? seed_.origin_id
                                                : seed_.seed_id);
    pair.chosen = chosen.WithId(pair.id + "/chosen");
    pair.rejected = rejected.WithId(pair.id + "/rejected");
    pair.source = PairSource::kMusic;
    pair.seed_id = seed_.seed_id.empty() ? seed_.origin_id : seed_.seed_id;
    pair.shared_prefix_len = seed_.sampled_h;
    outcome.pair = std::move(pair);
    return outcome;
  }

 private:
  SamplingConfig Sampling(const SamplingConfig& base, std::size_t t,
                          Branch branch, CallKind kind,
                          std::size_t attempt) const {
    SamplingConfig out = base;
    out.seed = DeriveSeed(base.seed.value_or(0),
                          {seed_salt_, t, branch, kind, attempt});
    return out;
  }

  std::string Call(ChatBackend& backend, std::span<const ChatMessage> messages,
                   const SamplingConfig& sampling) {
    try {
      return backend.Complete(messages, sampling);
    } catch (const BackendError& e) {
      throw Abandon{RolloutStatus::kAbandonedBackendFailure, e.what()};
    }
  }

  std::string SimulateUser(const Conversation& context, std::size_t t,
                           Branch branch, RolloutTrace& trace) {
    const std::vector<ChatMessage> messages = {
        {Role::kUser, RenderUserSim(context, prompts_)}};
    std::string last_error;
    for (std::size_t attempt = 0; attempt < 2; ++attempt) {
      if (attempt > 0) ++trace.parse_retries;
      const std::string raw = Call(
          user_, messages,
          Sampling(cfg_.user_sampling, t, branch, kUserCall, attempt));
      auto parsed = ParseUserSim(raw);
      if (parsed) return std::move(parsed).value();
      last_error = parsed.error().message;
    }
    throw Abandon{RolloutStatus::kAbandonedParseFailure,
                  "user simulator: " + last_error};
  }

  std::string AnswerDirectly(const Conversation& context,
                             const std::string& utterance, std::size_t t) {
    const std::vector<ChatMessage> messages =
        AssistantTurnMessages(context, utterance);
    return Call(assistant_, messages,
                Sampling(cfg_.assistant_sampling, t, kChosen, kAssistantCall,
                         0));
  }

  ContrastOutput AnswerWithContrast(const Conversation& context,
                                    const std::string& utterance,
                                    std::size_t t, RolloutTrace& trace) {
    const std::vector<ChatMessage> messages = {
        {Role::kUser, RenderContrast(context, utterance, prompts_)}};
    std::string last_error;
    for (std::size_t attempt = 0; attempt < 2; ++attempt) {
      if (attempt > 0) ++trace.parse_retries;
      const std::string raw =
          Call(assistant_, messages,
               Sampling(cfg_.assistant_sampling, t, kRejected, kAssistantCall,
                        attempt));
      auto parsed = ParseContrast(raw);
      if (parsed) return std::move(parsed).value();
      last_error = parsed.error().message;
    }
    throw Abandon{RolloutStatus::kAbandonedParseFailure,
                  "instruction contrast: " + last_error};
  }

  static void CountRepeat(const Conversation& context,
                          const std::string& utterance, RolloutTrace& trace) {
    for (const Turn& turn : context.turns()) {
      if (turn.user == utterance) {
        ++trace.repeated_user_turns;
        return;
      }
    }
  }

  const SeedContext& seed_;
  ChatBackend& user_;
  ChatBackend& assistant_;
  const RolloutConfig& cfg_;
  const PromptSet& prompts_;
  std::uint64_t seed_salt_;
};

}  // namespace

void ValidateRolloutConfig(const RolloutConfig& cfg) {
  if (cfg.max_turns == 0) {
    throw std::invalid_argument("rollout max_turns must be >= 1");
  }
  if (cfg.budget.max_tokens == 0) {
    throw std::invalid_argument("rollout max_tokens must be >= 1");
  }
  for (const SamplingConfig* s : {&cfg.user_sampling, &cfg.assistant_sampling}) {
    if (s->temperature < 0 || s->max_output_tokens <= 0) {
      throw std::invalid_argument("invalid rollout sampling config");
    }
  }
}

std::string_view RolloutStatusName(RolloutStatus status) {
  switch (status) {
    case RolloutStatus::kComplete:
      return "complete";
    case RolloutStatus::kStoppedAtBudget:
      return "stopped_at_budget";
    case RolloutStatus::kAbandonedParseFailure:
      return "abandoned_parse_failure";
    case RolloutStatus::kAbandonedBackendFailure:
      return "abandoned_backend_failure";
  }
  return "complete";
}

RolloutOutcome RolloutPair(const SeedContext& seed, ChatBackend& user_backend,
                           ChatBackend& assistant_backend,
                           const RolloutConfig& cfg) {
  ValidateRolloutConfig(cfg);
  if (auto v = ValidateConversation(seed.prefix)) {
    throw std::invalid_argument("RolloutPair: seed prefix: " + *v);
  }
  if (seed.sampled_h != seed.prefix.size()) {
    throw std::invalid_argument("RolloutPair: sampled_h != prefix length");
  }
  return RolloutRunner(seed, user_backend, assistant_backend, cfg).Run();
}

RolloutDatasetResult RolloutDataset(std::span<const SeedContext> seeds,
                                    ChatBackend& user_backend,
                                    ChatBackend& assistant_backend,
                                    const RolloutConfig& cfg,
                                    std::size_t max_parallel) {
  if (max_parallel == 0) {
    throw std::invalid_argument("RolloutDataset: max_parallel must be >= 1");
  }
  ValidateRolloutConfig(cfg);
  std::vector<RolloutOutcome> outcomes(seeds.size());
  ParallelFor(seeds.size(), max_parallel, [&](std::size_t i) {
    outcomes[i] = RolloutPair(seeds[i], user_backend, assistant_backend, cfg);
  });

  RolloutDatasetResult result;
  result.stats.seeds = seeds.size();
  result.traces.reserve(outcomes.size());
  for (RolloutOutcome& outcome : outcomes) {
    RolloutStats& s = result.stats;
    s.parse_retries += outcome.trace.parse_retries;
    s.repeated_user_turns += outcome.trace.repeated_user_turns;
    if (outcome.dropped_identical) {
      ++s.dropped_identical;
    } else {
      switch (outcome.trace.status) {
        case RolloutStatus::kAbandonedParseFailure:
          ++s.abandoned_parse;
          break;
        case RolloutStatus::kAbandonedBackendFailure:
          ++s.abandoned_backend;
          break;
        case RolloutStatus::kStoppedAtBudget:
          if (outcome.pair) ++s.stopped_at_budget;
          break;
        case RolloutStatus::kComplete:
          if (outcome.pair) ++s.completed;
          break;
      }
    }
    if (outcome.pair) result.pairs.push_back(std::move(*outcome.pair));
    result.traces.push_back(std::move(outcome.trace));
  }
  return result;
}

Json TraceToJson(const RolloutTrace& trace) {
  Json j;
  j["seed_id"] = trace.seed.seed_id;
  j["origin_id"] = trace.seed.origin_id;
  j["sampled_h"] = trace.seed.sampled_h;
  j["status"] = std::string(RolloutStatusName(trace.status));
  j["detail"] = trace.detail;
  j["parse_retries"] = trace.parse_retries;
  j["repeated_user_turns"] = trace.repeated_user_turns;
  Json turns = Json::array();
  for (const RolloutTurnRecord& r : trace.turns) {
    turns.push_back(Json{
        {"user_chosen", r.user_chosen},
        {"assistant_chosen", r.assistant_chosen},
        {"user_rejected", r.user_rejected},
        {"modified_instruction_discarded", r.modified_instruction_discarded},
        {"assistant_rejected", r.assistant_rejected}});
  }
  j["turns"] = std::move(turns);
  return j;
}

Json RolloutStatsToJson(const RolloutStats& s) {
  return Json{{"seeds", s.seeds},
              {"completed", s.completed},
              {"stopped_at_budget", s.stopped_at_budget},
              {"abandoned_parse", s.abandoned_parse},
              {"abandoned_backend", s.abandoned_backend},
              {"dropped_identical", s.dropped_identical},
              {"parse_retries", s.parse_retries},
              {"repeated_user_turns", s.repeated_user_turns}};
}

}  // namespace mtpref
