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

// Conversation data model shared by every stage of the pipeline: turns,
// conversations, preference pairs, token budgeting and dataset filtering.

#ifndef MTPREF_CONVERSATION_H_
#define MTPREF_CONVERSATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtpref {

// One complete (user, assistant) exchange.
struct Turn {
  std::string user;
  std::string assistant;

  friend bool operator==(const Turn&, const Turn&) = default;
};

// An ordered list of turns. A conversation of h turns is the prefix C_{1:h}
// of any conversation that extends it.
class Conversation {
 public:
  Conversation() = default;
  Conversation(std::string id, std::vector<Turn> turns)
      : id_(std::move(id)), turns_(std::move(turns)) {}

  const std::string& id() const { return id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  std::size_t size() const { return turns_.size(); }
  bool empty() const { return turns_.empty(); }
  const Turn& operator[](std::size_t i) const { return turns_[i]; }

  // First `h` turns (clamped to size()), keeping the id.
  Conversation Prefix(std::size_t h) const;
  // Copy with `turn` appended.
  Conversation Appended(Turn turn) const;
  Conversation WithId(std::string id) const;

  // Turn-wise equality, ignoring ids.
  bool SameTurns(const Conversation& other) const {
    return turns_ == other.turns_;
  }
  // True iff the first size() turns of `other` equal this conversation.
  bool IsPrefixOf(const Conversation& other) const;

  friend bool operator==(const Conversation&, const Conversation&) = default;

 private:
  std::string id_;
  std::vector<Turn> turns_;
};

enum class PairSource { kOriginal, kMusic };

std::string_view PairSourceName(PairSource source);
std::optional<PairSource> ParsePairSource(std::string_view name);

struct PreferencePair {
  std::string id;
  Conversation chosen;
  Conversation rejected;
  PairSource source = PairSource::kOriginal;
  std::optional<std::string> seed_id;
  std::size_t shared_prefix_len = 0;
  // Evaluation sets may tag pairs with a category for per-group accuracy.
  std::optional<std::string> category;

  friend bool operator==(const PreferencePair&,
                         const PreferencePair&) = default;
};

enum class TokenCounter {
  kWhitespace,     // maximal runs of non-space characters
  kCharsOverFour,  // ceil(bytes / 4) per text
};

std::string_view TokenCounterName(TokenCounter counter);
std::optional<TokenCounter> ParseTokenCounter(std::string_view name);

struct TokenBudget {
  std::size_t max_tokens = 2048;
  TokenCounter counter = TokenCounter::kWhitespace;
};

// Returns nullopt when the conversation is well formed, otherwise a
// human-readable description of the first violation found.
std::optional<std::string> ValidateConversation(const Conversation& c);

// Conversation checks on both sides plus the pair invariants: the sides
// differ textually and share their first shared_prefix_len turns.
std::optional<std::string> ValidatePair(const PreferencePair& pair);

std::size_t CountTokens(std::string_view text, TokenCounter counter);
// Visible text only: the sum over every user and assistant text.
std::size_t CountTokens(const Conversation& c, const TokenBudget& budget);

struct FilterStats {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t malformed = 0;
  std::size_t too_many_turns = 0;
  std::size_t over_budget = 0;
};

// Keeps a pair iff it is well formed and both sides have at most `max_turns`
// turns and at most budget.max_tokens tokens. Input order is preserved.
// Throws std::invalid_argument if max_turns is zero.
std::vector<PreferencePair> FilterDataset(std::span<const PreferencePair> pairs,
                                          const TokenBudget& budget,
                                          std::size_t max_turns,
                                          FilterStats* stats = nullptr);

}  // namespace mtpref

#endif  // MTPREF_CONVERSATION_H_
