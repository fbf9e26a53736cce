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

#include <stdexcept>

namespace mtpref {

void ValidateSamplerConfig(const SamplerConfig& cfg) {
  if (cfg.max_turns == 0) {
    throw std::invalid_argument("sampler max_turns must be >= 1");
  }
  if (cfg.budget.max_tokens == 0) {
    throw std::invalid_argument("sampler max_tokens must be >= 1");
  }
  if (cfg.seeds_per_conversation == 0) {
    throw std::invalid_argument("seeds_per_conversation must be >= 1");
  }
}

SeedContext SampleSeed(const Conversation& c, Rng& rng) {
  if (auto violation = ValidateConversation(c)) {
    throw std::invalid_argument("SampleSeed: " + *violation);
  }
  SeedContext seed;
  seed.origin_id = c.id();
  seed.origin_total_turns = c.size();
  seed.sampled_h = 1 + static_cast<std::size_t>(UniformIndex(rng, c.size()));
  seed.prefix = c.Prefix(seed.sampled_h);
  return seed;
}

std::vector<SeedContext> BuildSeedSet(std::span<const PreferencePair> pairs,
                                      const SamplerConfig& cfg,
                                      SeedSetStats* stats) {
  ValidateSamplerConfig(cfg);
  SeedSetStats local;
  const std::vector<PreferencePair> kept =
      FilterDataset(pairs, cfg.budget, cfg.max_turns, &local.filter);
  Rng rng(cfg.rng_seed);
  std::vector<SeedContext> seeds;
  seeds.reserve(kept.size() * cfg.seeds_per_conversation);
  for (const PreferencePair& pair : kept) {
    const Conversation source = pair.chosen.WithId(pair.id);
    for (std::size_t k = 0; k < cfg.seeds_per_conversation; ++k) {
      SeedContext seed = SampleSeed(source, rng);
      seed.seed_id = pair.id + "#" + std::to_string(k);
      seeds.push_back(std::move(seed));
    }
  }
  local.seeds = seeds.size();
  if (stats != nullptr) *stats = local;
  return seeds;
}

Json SeedToJson(const SeedContext& seed) {
  Json j;
  j["origin_id"] = seed.origin_id;
  j["sampled_h"] = seed.sampled_h;
  j["prefix"] = TurnsToJson(seed.prefix);
  j["seed_id"] = seed.seed_id;
  j["origin_total_turns"] = seed.origin_total_turns;
  return j;
}

SeedContext SeedFromJson(const Json& record) {
  if (!record.is_object()) throw SchemaError("seed record must be an object");
  SeedContext seed;
  if (!record.contains("origin_id") || !record["origin_id"].is_string()) {
    throw SchemaError("seed record lacks origin_id");
  }
  seed.origin_id = record["origin_id"].get<std::string>();
  if (!record.contains("sampled_h") ||
      !record["sampled_h"].is_number_unsigned()) {
    throw SchemaError("seed record lacks sampled_h");
  }
  seed.sampled_h = record["sampled_h"].get<std::size_t>();
  if (!record.contains("prefix")) throw SchemaError("seed record lacks prefix");
  seed.prefix = ConversationFromJson(record["prefix"], seed.origin_id);
  seed.seed_id = record.value("seed_id", seed.origin_id + "#0");
  seed.origin_total_turns =
      record.value("origin_total_turns", static_cast<std::size_t>(0));
  if (seed.origin_total_turns == 0) seed.origin_total_turns = seed.sampled_h;
  if (seed.sampled_h == 0 || seed.prefix.size() != seed.sampled_h ||
      seed.sampled_h > seed.origin_total_turns) {
    throw SchemaError("seed record violates 1 <= sampled_h <= total turns");
  }
  if (auto v = ValidateConversation(seed.prefix)) throw SchemaError(*v);
  return seed;
}

void WriteSeedsJsonl(const std::filesystem::path& path,
                     std::span<const SeedContext> seeds) {
  std::vector<Json> rows;
  rows.reserve(seeds.size());
  for (const SeedContext& s : seeds) rows.push_back(SeedToJson(s));
  WriteJsonl(path, rows);
}

JsonlReadResult<SeedContext> ReadSeedsJsonl(const std::filesystem::path& path) {
  JsonlReadResult<SeedContext> result;
  result.errors = ForEachJsonlRecord(path, [&](const Json& j) {
    result.records.push_back(SeedFromJson(j));
  });
  return result;
}

}  // namespace mtpref
