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

#include "mtpref/synthetic.h"

#include <array>
#include <stdexcept>
#include <string>

#include "mtpref/random.h"

namespace mtpref {
namespace {

struct Topic {
  const char* name;
  const char* category;
  std::array<const char*, 4> words;
};

constexpr std::array<Topic, 12> kTopics = {{
    {"photosynthesis", "science", {"chlorophyll", "sunlight", "glucose",
                                    "stomata"}},
    {"volcanoes", "science", {"magma", "eruptions", "tectonic", "basalt"}},
    {"compound interest", "finance", {"principal", "compounding", "savings",
                                       "inflation"}},
    {"index funds", "finance", {"diversification", "expense", "benchmark",
                                "portfolio"}},
    {"binary search", "coding", {"sorted", "midpoint", "logarithmic",
                                 "boundaries"}},
    {"hash tables", "coding", {"buckets", "collisions", "hashing",
                               "resizing"}},
    {"marathon training", "health", {"mileage", "tapering", "hydration",
                                     "pacing"}},
    {"sleep hygiene", "health", {"circadian", "melatonin", "caffeine",
                                 "routine"}},
    {"roman history", "history", {"senate", "legions", "emperors",
                                  "republic"}},
    {"printing press", "history", {"gutenberg", "movable", "literacy",
                                   "pamphlets"}},
    {"french cooking", "cooking", {"butter", "sauces", "braising",
                                   "shallots"}},
    {"bread baking", "cooking", {"gluten", "kneading", "proofing", "yeast"}},
}};

constexpr std::array<const char*, 4> kOffTopic = {
    "Honestly, the weather has been pleasant lately, and",
    "Music from the baroque period has many ornaments, so",
    "Chess openings vary widely between players, although",
    "Gardening in spring takes patience because",
};

std::string UserText(const Topic& topic, std::size_t t, Rng& rng) {
  const std::string a = topic.words[UniformIndex(rng, 4)];
  const std::string b = topic.words[(t + 1) % 4];
  switch (UniformIndex(rng, 3)) {
    case 0:
      return "Tell me about " + a + " in " + topic.name + ".";
    case 1:
      return "How do " + a + " and " + b + " relate in " + topic.name + "?";
    default:
      return "Why does " + a + " matter for " + topic.name + "?";
  }
}

std::string GoodReply(const Topic& topic, const std::string& user) {
  std::string reply = "In " + std::string(topic.name) + ", ";
  // Echo the question's topic words so the reply is on point.
  bool any = false;
  for (const char* w : topic.words) {
    if (user.find(w) != std::string::npos) {
      reply += any ? std::string(" and ") + w : std::string(w);
      any = true;
    }
  }
  if (!any) reply += topic.words[0];
  reply += " play a central role. A careful explanation covers how they "
           "interact, a worked example, and the common pitfalls to avoid.";
  return reply;
}

}  // namespace

std::vector<PreferencePair> MakeSyntheticPairs(
    const SyntheticDatasetConfig& cfg) {
  if (cfg.min_turns == 0 || cfg.min_turns > cfg.max_turns) {
    throw std::invalid_argument("synthetic: need 1 <= min_turns <= max_turns");
  }
  Rng rng(cfg.seed);
  std::vector<PreferencePair> pairs;
  const std::size_t total = cfg.pairs + cfg.overlong_pairs;
  pairs.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const Topic& topic = kTopics[UniformIndex(rng, kTopics.size())];
    const std::size_t turns =
        i < cfg.pairs
            ? cfg.min_turns +
                  UniformIndex(rng, cfg.max_turns - cfg.min_turns + 1)
            : cfg.max_turns + 1;
    std::vector<Turn> shared;
    for (std::size_t t = 0; t + 1 < turns; ++t) {
      std::string user = UserText(topic, t, rng);
      shared.push_back(Turn{user, GoodReply(topic, user)});
    }
    const std::string last_user = UserText(topic, turns, rng);
    std::vector<Turn> chosen = shared;
    chosen.push_back(Turn{last_user, GoodReply(topic, last_user)});
    std::vector<Turn> rejected = shared;
    rejected.push_back(
        Turn{last_user, kOffTopic[UniformIndex(rng, kOffTopic.size())]});

    PreferencePair pair;
    pair.id = cfg.id_prefix + "-" + std::to_string(i);
    pair.chosen = Conversation(pair.id + "/chosen", std::move(chosen));
    pair.rejected = Conversation(pair.id + "/rejected", std::move(rejected));
    pair.source = PairSource::kOriginal;
    pair.shared_prefix_len = turns - 1;
    pair.category = topic.category;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<PromptItem> MakeSyntheticPrompts(std::size_t n,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PromptItem> prompts;
  prompts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Topic& topic = kTopics[UniformIndex(rng, kTopics.size())];
    prompts.push_back(PromptItem{"prompt-" + std::to_string(i),
                                 UserText(topic, i, rng)});
  }
  return prompts;
}

}  // namespace mtpref
