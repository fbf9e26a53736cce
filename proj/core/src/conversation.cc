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

#include "mtpref/conversation.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "text_util.h"

namespace mtpref {

Conversation Conversation::Prefix(std::size_t h) const {
  h = std::min(h, turns_.size());
  return Conversation(id_, std::vector<Turn>(turns_.begin(),
                                             turns_.begin() + h));
}

Conversation Conversation::Appended(Turn turn) const {
  std::vector<Turn> turns = turns_;
  turns.push_back(std::move(turn));
  return Conversation(id_, std::move(turns));
}

Conversation Conversation::WithId(std::string id) const {
  return Conversation(std::move(id), turns_);
}

bool Conversation::IsPrefixOf(const Conversation& other) const {
  if (turns_.size() > other.turns_.size()) return false;
  return std::equal(turns_.begin(), turns_.end(), other.turns_.begin());
}

std::string_view PairSourceName(PairSource source) {
  switch (source) {
    case PairSource::kOriginal:
      return "original";
    case PairSource::kMusic:
      return "music";
  }
  return "original";
}

std::optional<PairSource> ParsePairSource(std::string_view name) {
  if (name == "original") return PairSource::kOriginal;
  if (name == "music") return PairSource::kMusic;
  return std::nullopt;
}

std::string_view TokenCounterName(TokenCounter counter) {
  switch (counter) {
    case TokenCounter::kWhitespace:
      return "whitespace";
    case TokenCounter::kCharsOverFour:
      return "chars4";
  }
  return "whitespace";
}

std::optional<TokenCounter> ParseTokenCounter(std::string_view name) {
  if (name == "whitespace") return TokenCounter::kWhitespace;
  if (name == "chars4") return TokenCounter::kCharsOverFour;
  return std::nullopt;
}

std::optional<std::string> ValidateConversation(const Conversation& c) {
  if (c.empty()) return "conversation has no turns";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (internal::Trim(c[i].user).empty()) {
      return "empty user text at turn " + std::to_string(i);
    }
    if (internal::Trim(c[i].assistant).empty()) {
      return "empty assistant text at turn " + std::to_string(i);
    }
  }
  return std::nullopt;
}

std::optional<std::string> ValidatePair(const PreferencePair& pair) {
  if (auto v = ValidateConversation(pair.chosen)) return "chosen: " + *v;
  if (auto v = ValidateConversation(pair.rejected)) return "rejected: " + *v;
  if (pair.chosen.SameTurns(pair.rejected)) {
    return "chosen and rejected are identical";
  }
  if (pair.shared_prefix_len > pair.chosen.size() ||
      pair.shared_prefix_len > pair.rejected.size()) {
    return "shared_prefix_len exceeds conversation length";
  }
  for (std::size_t i = 0; i < pair.shared_prefix_len; ++i) {
    if (!(pair.chosen[i] == pair.rejected[i])) {
      return "shared prefix differs at turn " + std::to_string(i);
    }
  }
  return std::nullopt;
}

std::size_t CountTokens(std::string_view text, TokenCounter counter) {
  switch (counter) {
    case TokenCounter::kWhitespace: {
      std::size_t count = 0;
      bool in_token = false;
      for (unsigned char ch : text) {
        const bool space = std::isspace(ch) != 0;
        if (!space && !in_token) ++count;
        in_token = !space;
      }
      return count;
    }
    case TokenCounter::kCharsOverFour:
      return (text.size() + 3) / 4;
  }
  return 0;
}

std::size_t CountTokens(const Conversation& c, const TokenBudget& budget) {
  std::size_t total = 0;
  for (const Turn& turn : c.turns()) {
    total += CountTokens(turn.user, budget.counter);
    total += CountTokens(turn.assistant, budget.counter);
  }
  return total;
}

std::vector<PreferencePair> FilterDataset(std::span<const PreferencePair> pairs,
                                          const TokenBudget& budget,
                                          std::size_t max_turns,
                                          FilterStats* stats) {
  if (max_turns == 0) {
    throw std::invalid_argument("FilterDataset: max_turns must be >= 1");
  }
  FilterStats local;
  std::vector<PreferencePair> kept;
  for (const PreferencePair& pair : pairs) {
    ++local.input;
    if (ValidatePair(pair)) {
      ++local.malformed;
      continue;
    }
    if (pair.chosen.size() > max_turns || pair.rejected.size() > max_turns) {
      ++local.too_many_turns;
      continue;
    }
    if (CountTokens(pair.chosen, budget) > budget.max_tokens ||
        CountTokens(pair.rejected, budget) > budget.max_tokens) {
      ++local.over_budget;
      continue;
    }
    ++local.kept;
    kept.push_back(pair);
  }
  if (stats != nullptr) *stats = local;
  return kept;
}

}  // namespace mtpref
