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

// Synthetic preference data for offline runs. Conversations stay on one
// topic; in each pair the chosen final reply answers the question while the
// rejected one drifts off topic and stops short, the same quality signal the
// template mock produces.

#ifndef MTPREF_SYNTHETIC_H_
#define MTPREF_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mtpref/bon_eval.h"
#include "mtpref/conversation.h"

namespace mtpref {

struct SyntheticDatasetConfig {
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  std::size_t min_turns = 1;
  std::size_t max_turns = 5;
  // Pairs built with max_turns + 1 turns, for exercising turn filters.
  std::size_t overlong_pairs = 0;
  std::string id_prefix = "syn";
};

std::vector<PreferencePair> MakeSyntheticPairs(
    const SyntheticDatasetConfig& cfg);

std::vector<PromptItem> MakeSyntheticPrompts(std::size_t n,
                                             std::uint64_t seed);

}  // namespace mtpref

#endif  // MTPREF_SYNTHETIC_H_
