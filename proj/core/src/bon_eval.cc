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

#include "mtpref/bon_eval.h"

#include "mtpref/parallel.h"
#include "mtpref/random.h"
#include "text_util.h"

namespace mtpref {
namespace {

const PromptSet& Prompts(const BonConfig& cfg) {
  return cfg.prompts ? *cfg.prompts : PromptSet::Embedded();
}

SamplingConfig Seeded(const SamplingConfig& base,
                      std::initializer_list<std::uint64_t> salts) {
  SamplingConfig out = base;
  out.seed = DeriveSeed(base.seed.value_or(0), salts);
  return out;
}

// Thrown inside BonConversation to end it early.
struct AbandonSignal {
  BonAbandon abandon;
};

std::string SimulateUser(const Conversation& conv, ChatBackend& user,
                         const BonConfig& cfg, std::uint64_t salt,
                         std::size_t turn) {
  const std::vector<ChatMessage> messages = {
      {Role::kUser, RenderUserSim(conv, Prompts(cfg))}};
  std::string last_error;
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    std::string raw;
    try {
      raw = user.Complete(messages,
                          Seeded(cfg.user_sampling, {salt, turn, attempt}));
    } catch (const BackendError& e) {
      throw AbandonSignal{{BonAbandonReason::kBackendFailure, e.what()}};
    }
    auto parsed = ParseUserSim(raw);
    if (parsed) return std::move(parsed).value();
    last_error = parsed.error().message;
  }
  throw AbandonSignal{{BonAbandonReason::kUserParseFailure, last_error}};
}

}  // namespace

Scorer MakeRewardScorer(std::shared_ptr<const Featurizer> featurizer,
                        RewardModelParams params) {
  if (!featurizer || !(featurizer->spec() == params.featurizer)) {
    throw DimensionMismatch("MakeRewardScorer: featurizer does not match");
  }
  return [featurizer = std::move(featurizer),
          params = std::move(params)](const Conversation& c) {
    return Score(c, params, *featurizer);
  };
}

void ValidateBonConfig(const BonConfig& cfg) {
  if (cfg.n_candidates == 0) {
    throw std::invalid_argument("n_candidates must be >= 1");
  }
  if (cfg.horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.max_in_flight == 0 || cfg.max_parallel_prompts == 0) {
    throw std::invalid_argument("parallelism limits must be >= 1");
  }
  for (const SamplingConfig* s :
       {&cfg.assistant_sampling, &cfg.user_sampling, &cfg.judge_sampling}) {
    if (s->temperature < 0 || s->max_output_tokens <= 0) {
      throw std::invalid_argument("invalid sampling config");
    }
  }
}

BonConfig EffectiveBonConfig(const BonConfig& cfg) {
  BonConfig out = cfg;
  if (out.greedy) {
    out.n_candidates = 1;
    out.assistant_sampling.temperature = 0.0;
  }
  return out;
}

std::optional<std::size_t> ArgmaxLowestIndex(
    std::span<const std::optional<double>> scores) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    if (!best || *scores[i] > *scores[*best]) best = i;
  }
  return best;
}

BonTurnResult BonTurn(const Conversation& context,
                      std::string_view user_utterance, const Scorer& scorer,
                      ChatBackend& assistant_backend, const BonConfig& cfg,
                      std::uint64_t salt) {
  const BonConfig eff = EffectiveBonConfig(cfg);
  ValidateBonConfig(eff);
  const std::vector<ChatMessage> messages =
      AssistantTurnMessages(context, user_utterance);
  std::vector<CompletionRequest> requests;
  requests.reserve(eff.n_candidates);
  for (std::uint64_t i = 0; i < eff.n_candidates; ++i) {
    requests.push_back({messages, Seeded(eff.assistant_sampling, {salt, i})});
  }
  std::vector<CompletionResult> results =
      CompleteBatch(assistant_backend, requests, eff.max_in_flight);

  BonTurnResult out;
  out.candidates.resize(results.size());
  out.scores.resize(results.size());
  std::string last_error;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]) {
      last_error = results[i].error().what();
      continue;
    }
    out.candidates[i] = results[i].value();
    out.scores[i] = scorer(
        context.Appended(Turn{std::string(user_utterance), out.candidates[i]}));
  }
  auto best = ArgmaxLowestIndex(out.scores);
  if (!best) {
    throw BonTurnFailure("all " + std::to_string(results.size()) +
                         " candidates failed: " + last_error);
  }
  out.chosen_index = *best;
  out.chosen_text = out.candidates[*best];
  return out;
}

Expected<Conversation, BonAbandon> BonConversation(
    std::string_view prompt, const Scorer& scorer, BonBackends backends,
    const BonConfig& cfg, std::uint64_t salt,
    std::span<const std::string> forced_user_turns) {
  if (internal::Trim(prompt).empty()) {
    throw std::invalid_argument("BonConversation: empty prompt");
  }
  ValidateBonConfig(cfg);
  Conversation conv;
  try {
    for (std::size_t t = 1; t <= cfg.horizon; ++t) {
      std::string user_text;
      if (t == 1) {
        user_text = std::string(prompt);
      } else if (t - 2 < forced_user_turns.size()) {
        user_text = forced_user_turns[t - 2];
      } else {
        user_text = SimulateUser(conv, backends.user, cfg, salt, t);
      }
      BonTurnResult turn;
      try {
        turn = BonTurn(conv, user_text, scorer, backends.assistant, cfg,
                       DeriveSeed(salt, {t}));
      } catch (const BonTurnFailure& e) {
        throw AbandonSignal{{BonAbandonReason::kBackendFailure, e.what()}};
      }
      conv = conv.Appended(Turn{std::move(user_text), turn.chosen_text});
    }
  } catch (const AbandonSignal& signal) {
    return MakeUnexpected(signal.abandon);
  }
  return conv;
}

Verdict RemapSwapped(Verdict v) {
  switch (v) {
    case Verdict::kA:
      return Verdict::kB;
    case Verdict::kB:
      return Verdict::kA;
    case Verdict::kInvalid:
      return Verdict::kInvalid;
  }
  return Verdict::kInvalid;
}

VerdictPair JudgePair(const Conversation& conv_a, const Conversation& conv_b,
                      ChatBackend& judge, const SamplingConfig& sampling,
                      const PromptSet& prompts) {
  auto call = [&](const Conversation& first, const Conversation& second,
                  std::uint64_t order) {
    const std::vector<ChatMessage> messages = {
        {Role::kUser, RenderEvaluator(first, second, prompts)}};
    try {
      return ParseVerdict(judge.Complete(messages, Seeded(sampling, {order})))
          .winner;
    } catch (const BackendError&) {
      return Verdict::kInvalid;
    }
  };
  VerdictPair out;
  out.original = call(conv_a, conv_b, 0);
  out.swapped_remapped = RemapSwapped(call(conv_b, conv_a, 1));
  return out;
}

WinrateReport Winrate(std::span<const VerdictPair> verdicts) {
  WinrateReport r;
  r.comparisons = verdicts.size();
  for (const VerdictPair& pair : verdicts) {
    std::size_t a = 0, b = 0, invalid = 0;
    for (Verdict v : {pair.original, pair.swapped_remapped}) {
      if (v == Verdict::kA) ++a;
      if (v == Verdict::kB) ++b;
      if (v == Verdict::kInvalid) ++invalid;
    }
    r.calls_favoring_a += a;
    r.calls_favoring_b += b;
    r.invalid_calls += invalid;
    if (invalid > 0) {
      ++r.invalid;
    } else if (a == 2) {
      ++r.wins_a;
    } else if (b == 2) {
      ++r.wins_b;
    } else {
      ++r.ties_from_split;
    }
  }
  const std::size_t valid = r.calls_favoring_a + r.calls_favoring_b;
  if (valid > 0) {
    r.winrate_a = static_cast<double>(r.calls_favoring_a) /
                  static_cast<double>(valid);
  }
  return r;
}

Json WinrateReportToJson(const WinrateReport& r) {
  Json j;
  j["comparisons"] = r.comparisons;
  j["wins_a"] = r.wins_a;
  j["wins_b"] = r.wins_b;
  j["ties_from_split"] = r.ties_from_split;
  j["invalid"] = r.invalid;
  j["calls_favoring_a"] = r.calls_favoring_a;
  j["calls_favoring_b"] = r.calls_favoring_b;
  j["invalid_calls"] = r.invalid_calls;
  j["winrate_a"] = r.winrate_a ? Json(*r.winrate_a) : Json(nullptr);
  return j;
}

BonSide BonSide::Greedy() {
  return BonSide{"greedy", [](const Conversation&) { return 0.0; }, true};
}

Json ComparisonRecordToJson(const ComparisonRecord& record) {
  Json j;
  j["prompt_id"] = record.prompt_id;
  j["conv_a"] = TurnsToJson(record.conv_a);
  j["conv_b"] = TurnsToJson(record.conv_b);
  j["verdict_ab"] = std::string(VerdictName(record.verdicts.original));
  j["verdict_ba_remapped"] =
      std::string(VerdictName(record.verdicts.swapped_remapped));
  return j;
}

ComparisonResult CompareRms(std::span<const PromptItem> prompts,
                            const BonSide& side_a, const BonSide& side_b,
                            BonBackends backends, ChatBackend& judge,
                            const BonConfig& cfg) {
  ValidateBonConfig(cfg);
  BonConfig cfg_a = cfg;
  cfg_a.greedy = cfg.greedy || side_a.greedy;
  BonConfig cfg_b = cfg;
  cfg_b.greedy = cfg.greedy || side_b.greedy;

  std::vector<std::optional<ComparisonRecord>> slots(prompts.size());
  ParallelFor(prompts.size(), cfg.max_parallel_prompts, [&](std::size_t i) {
    const PromptItem& item = prompts[i];
    const std::uint64_t salt = internal::Fnv1a64(item.id);
    auto conv_a =
        BonConversation(item.text, side_a.scorer, backends, cfg_a, salt);
    if (!conv_a) return;
    std::vector<std::string> shared;
    if (cfg.shared_user) {
      for (std::size_t t = 1; t < conv_a->size(); ++t) {
        shared.push_back((*conv_a)[t].user);
      }
    }
    auto conv_b = BonConversation(item.text, side_b.scorer, backends, cfg_b,
                                  salt, shared);
    if (!conv_b) return;
    ComparisonRecord record;
    record.prompt_id = item.id;
    record.conv_a = conv_a->WithId(item.id + "/" + side_a.name);
    record.conv_b = conv_b->WithId(item.id + "/" + side_b.name);
    record.verdicts = JudgePair(record.conv_a, record.conv_b, judge,
                                cfg.judge_sampling, Prompts(cfg));
    slots[i] = std::move(record);
  });

  ComparisonResult result;
  std::vector<VerdictPair> verdicts;
  for (auto& slot : slots) {
    if (!slot) {
      ++result.abandoned;
      continue;
    }
    verdicts.push_back(slot->verdicts);
    result.records.push_back(std::move(*slot));
  }
  result.report = Winrate(verdicts);
  return result;
}

}  // namespace mtpref
