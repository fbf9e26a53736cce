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

// Seed contexts: conversation prefixes whose length is drawn uniformly from
// {1, ..., H} for a source conversation of H turns.

#ifndef MTPREF_SEED_SAMPLER_H_
#define MTPREF_SEED_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mtpref/conversation.h"
#include "mtpref/jsonl.h"
#include "mtpref/random.h"

namespace mtpref {

struct SeedContext {
  Conversation prefix;
  std::string origin_id;
  std::size_t origin_total_turns = 0;
  std::size_t sampled_h = 0;
  // "<origin_id>#<k>" for the k-th seed drawn from the origin.
  std::string seed_id;

  friend bool operator==(const SeedContext&, const SeedContext&) = default;
};

struct SamplerConfig {
  std::uint64_t rng_seed = 0;
  std::size_t max_turns = 5;
  TokenBudget budget;
  std::size_t seeds_per_conversation = 1;
};

// Throws std::invalid_argument on a zero bound.
void ValidateSamplerConfig(const SamplerConfig& cfg);

// Draws h uniformly from {1, ..., c.size()} and copies the first h turns.
// Throws std::invalid_argument if `c` is not a valid conversation.
SeedContext SampleSeed(const Conversation& c, Rng& rng);

struct SeedSetStats {
  FilterStats filter;
  std::size_t seeds = 0;
};

// Filters `pairs` with FilterDataset(cfg.budget, cfg.max_turns), then draws
// cfg.seeds_per_conversation seeds from each surviving pair's chosen side,
// in input order, from a single generator seeded with cfg.rng_seed.
std::vector<SeedContext> BuildSeedSet(std::span<const PreferencePair> pairs,
                                      const SamplerConfig& cfg,
                                      SeedSetStats* stats = nullptr);

// {"origin_id": str, "sampled_h": int, "prefix": [...turns...]} plus
// "seed_id" and "origin_total_turns".
Json SeedToJson(const SeedContext& seed);
SeedContext SeedFromJson(const Json& record);

void WriteSeedsJsonl(const std::filesystem::path& path,
                     std::span<const SeedContext> seeds);
JsonlReadResult<SeedContext> ReadSeedsJsonl(const std::filesystem::path& path);

}  // namespace mtpref

#endif  // MTPREF_SEED_SAMPLER_H_
