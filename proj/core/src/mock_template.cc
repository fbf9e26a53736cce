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

// Template-mode mock. Replies are a pure function of the messages (and of the
// seed when sampling at positive temperature). The quality model is simple on
// purpose so that downstream learning has a known signal:
//   * assistant replies reuse the content words of the user's question, with
//     sampled replies sometimes degrading to partial or generic answers;
//   * contrast answers switch to an unrelated topic and stop mid-sentence;
//   * the judge prefers the conversation whose replies cover more of the
//     user's content words, and answers [[A]] on ties.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "mtpref/gateway.h"
#include "mtpref/prompts.h"
#include "mtpref/random.h"
#include "text_util.h"

namespace mtpref {
namespace {

struct TranscriptLine {
  bool is_user;
  std::string text;
};

std::vector<TranscriptLine> ParseTranscriptLines(std::string_view text) {
  std::vector<TranscriptLine> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (line.starts_with("User: ")) {
      lines.push_back({true, std::string(line.substr(6))});
    } else if (line.starts_with("Assistant: ")) {
      lines.push_back({false, std::string(line.substr(11))});
    }
    pos = end + 1;
  }
  return lines;
}

// Words the mock's own question templates introduce; skipping them keeps a
// simulated conversation anchored on its original topic.
constexpr std::array<std::string_view, 20> kTemplateWords = {
    "affect",  "practice", "give",   "concrete", "example", "involving",
    "common",  "mistakes", "people", "make",     "when",    "involved",
    "compare", "detail",   "tell",   "relate",   "matter",  "does",
    "could",   "explain"};

bool IsTemplateWord(const std::string& w) {
  return std::find(kTemplateWords.begin(), kTemplateWords.end(), w) !=
         kTemplateWords.end();
}

std::vector<std::string> Keywords(std::string_view text, std::size_t limit) {
  std::vector<std::string> out;
  for (std::string& w : internal::ContentWords(text)) {
    if (IsTemplateWord(w)) continue;
    if (std::find(out.begin(), out.end(), w) == out.end()) {
      out.push_back(std::move(w));
      if (out.size() == limit) break;
    }
  }
  return out;
}

std::string Capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(
                      static_cast<unsigned char>(s[0])));
  return s;
}

std::uint64_t Draw(std::span<const ChatMessage> messages,
                   const SamplingConfig& sampling) {
  std::uint64_t h = 0;
  for (const ChatMessage& m : messages) {
    h = internal::Fnv1a64(m.content, h ^ static_cast<std::uint64_t>(m.role));
  }
  if (sampling.temperature > 0) {
    h = DeriveSeed(sampling.seed.value_or(0), {h});
  }
  return SplitMix64(h);
}

std::string UserSimReply(std::string_view prompt, std::uint64_t draw) {
  const auto lines = ParseTranscriptLines(prompt);
  std::string last_user, last_assistant;
  for (const auto& line : lines) {
    (line.is_user ? last_user : last_assistant) = line.text;
  }
  std::vector<std::string> from_user = Keywords(last_user, 3);
  std::string k0 = from_user.empty() ? "this topic" : from_user[0];
  // The follow-up pairs k0 with another topic word the user raised earlier,
  // preferring one the last reply picked up.
  std::string all_user;
  for (const auto& line : lines) {
    if (line.is_user) all_user += line.text + "\n";
  }
  const std::vector<std::string> reply_words =
      internal::ContentWords(last_assistant);
  std::string k1;
  for (const std::string& w : Keywords(all_user, 16)) {
    if (w == k0) continue;
    const bool echoed = std::find(reply_words.begin(), reply_words.end(),
                                  w) != reply_words.end();
    if (echoed) {
      k1 = w;
      break;
    }
    if (k1.empty()) k1 = w;
  }
  if (k1.empty()) k1 = "the details";

  std::string question;
  switch (draw % 4) {
    case 0:
      question = "How does " + k0 + " affect " + k1 + " in practice?";
      break;
    case 1:
      question = "Can you give a concrete example involving " + k0 + " and " +
                 k1 + "?";
      break;
    case 2:
      question = "What are common mistakes people make with " + k0 +
                 " when " + k1 + " is involved?";
      break;
    default:
      question = "Could you compare " + k0 + " with " + k1 +
                 " in more detail?";
      break;
  }
  return "Justification: The last reply mentioned " + k1 +
         ", and I still want to understand " + k0 + " better.\nQuestion: " +
         question;
}

struct ShiftTopic {
  std::string_view name;
  std::string_view a;
  std::string_view b;
};

constexpr std::array<ShiftTopic, 8> kShiftTopics = {{
    {"sourdough fermentation", "starter", "crust"},
    {"tidal power", "turbines", "estuaries"},
    {"medieval masonry", "buttresses", "limestone"},
    {"beekeeping", "hives", "pollen"},
    {"origami", "creases", "paper"},
    {"glacier formation", "snowpack", "moraines"},
    {"jazz harmony", "chords", "voicings"},
    {"lighthouse keeping", "lenses", "shipping"},
}};

std::string ContrastReply(std::string_view prompt, std::uint64_t draw) {
  const auto lines = ParseTranscriptLines(prompt);
  std::string utterance;
  for (const auto& line : lines) {
    if (line.is_user) utterance = line.text;
  }
  const std::vector<std::string> kw = Keywords(utterance, 8);
  const std::string anchor = kw.empty() ? "the question" : kw[0];
  // Pick a topic sharing no words with the utterance.
  const ShiftTopic* topic = &kShiftTopics[draw % kShiftTopics.size()];
  for (std::size_t i = 0; i < kShiftTopics.size(); ++i) {
    const ShiftTopic& t = kShiftTopics[(draw + i) % kShiftTopics.size()];
    bool clash = false;
    for (const std::string& w : internal::Words(std::string(t.name) + " " +
                                                std::string(t.a) + " " +
                                                std::string(t.b))) {
      if (std::find(kw.begin(), kw.end(), w) != kw.end()) clash = true;
    }
    if (!clash) {
      topic = &t;
      break;
    }
  }
  return "Modified Instruction: Describe " + std::string(topic->name) +
         " instead of answering about " + anchor +
         ".\nAnswer: " + Capitalized(std::string(topic->name)) +
         " mostly depends on the " + std::string(topic->a) + " and the " +
         std::string(topic->b) + ", although";
}

double Relevance(const std::string& user, const std::string& assistant) {
  const auto wanted = Keywords(user, 64);
  if (wanted.empty()) return 0.0;
  const auto have = internal::ContentWords(assistant);
  std::size_t hits = 0;
  for (const std::string& w : wanted) {
    if (std::find(have.begin(), have.end(), w) != have.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(wanted.size());
}

double ConversationRelevance(std::string_view transcript) {
  const auto lines = ParseTranscriptLines(transcript);
  double total = 0;
  std::size_t turns = 0;
  std::string user;
  for (const auto& line : lines) {
    if (line.is_user) {
      user = line.text;
    } else {
      total += Relevance(user, line.text);
      ++turns;
    }
  }
  return turns == 0 ? 0.0 : total / static_cast<double>(turns);
}

std::string Section(std::string_view text, std::string_view start,
                    std::string_view end) {
  const std::size_t s = text.find(start);
  if (s == std::string_view::npos) return {};
  const std::size_t from = s + start.size();
  const std::size_t e = text.find(end, from);
  return std::string(text.substr(from, e == std::string_view::npos
                                           ? std::string_view::npos
                                           : e - from));
}

std::string JudgeReply(std::string_view prompt) {
  const double a =
      ConversationRelevance(Section(prompt, kEvaluatorStartA, kEvaluatorEndA));
  const double b =
      ConversationRelevance(Section(prompt, kEvaluatorStartB, kEvaluatorEndB));
  const bool pick_b = b > a;
  return std::string("Assistant ") + (pick_b ? "B" : "A") +
         " addresses the user's requests more directly across the "
         "conversation.\n\n" +
         std::string(pick_b ? kVerdictB : kVerdictA);
}

std::string AssistantReply(std::string_view question,
                           const SamplingConfig& sampling,
                           std::uint64_t draw) {
  const std::vector<std::string> kw = Keywords(question, 4);
  // 0 = generic, 1 = partial, 2 = full. Greedy decoding is always partial.
  int level = 1;
  if (sampling.temperature > 0) {
    const std::uint64_t bucket = draw % 20;
    level = bucket < 12 ? 2 : (bucket < 17 ? 1 : 0);
  }
  if (kw.empty()) level = 0;
  const bool alt = ((draw >> 17) & 1) != 0;
  if (level == 0) {
    return alt ? "That depends on many factors, and it is hard to say in "
                 "general."
               : "There are several ways to look at it, and each has "
                 "tradeoffs.";
  }
  if (level == 1) {
    return Capitalized(kw[0]) +
           (alt ? " is worth looking at here; it usually explains most of "
                  "what you see."
                : " is the main thing to focus on, and the rest follows "
                  "from it.");
  }
  std::string covered = kw[0];
  for (std::size_t i = 1; i < kw.size(); ++i) {
    covered += (i + 1 == kw.size() ? " and " : ", ") + kw[i];
  }
  const std::string& last = kw.back();
  if (alt) {
    return "Good question. " + Capitalized(covered) +
           " are closely connected. Start from " + kw[0] +
           ", work out how it shapes " + last +
           ", and check each step with a small worked example before "
           "generalizing.";
  }
  return Capitalized(kw[0]) + " matters here because it drives " + last +
         ". In practice you should look at " + covered +
         " together, compare a couple of concrete cases, and note where "
         "the assumptions break.";
}

}  // namespace

std::string TemplateMockReply(std::span<const ChatMessage> messages,
                              const SamplingConfig& sampling) {
  const std::string& prompt = messages.back().content;
  const std::uint64_t draw = Draw(messages, sampling);
  if (internal::Contains(prompt, kEvaluatorStartA) &&
      internal::Contains(prompt, kEvaluatorStartB)) {
    return JudgeReply(prompt);
  }
  if (internal::Contains(prompt, kContrastMarker)) {
    return ContrastReply(prompt, draw);
  }
  if (internal::Contains(prompt, kUserSimMarker)) {
    return UserSimReply(prompt, draw);
  }
  return AssistantReply(prompt, sampling, draw);
}

}  // namespace mtpref
