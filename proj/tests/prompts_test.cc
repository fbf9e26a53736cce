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

#include "mtpref/prompts.h"

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mtpref/jsonl.h"
#include "test_support.h"

namespace mtpref {
namespace {

using ::mtpref::testing::MakeConversation;
using ::mtpref::testing::ReadFile;
using ::mtpref::testing::TempDir;
using ::mtpref::testing::WriteFile;

constexpr std::string_view kContrastBlock =
    "### Instructions:\n\n"
    "FIRST, generate a modified instruction that is highly relevant but not "
    "semantically identical to the instruction above from the user in the "
    "last turn.\n\n"
    "SECOND, on a new line, generate a high-quality answer which is a good "
    "response to the modified instruction but not a good response to the "
    "original user question.\n\n"
    "Your response should use the format:\n\n"
    "Modified Instruction:\n\n"
    "Answer:";

std::size_t Count(const std::string& s, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos;
       p = s.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

std::string AssetBody(const std::string& name) {
  std::string s = ReadFile(std::string(MTPREF_PROMPT_ASSETS) + "/" + name);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

TEST(TemplatesTest, EmbeddedMatchesAssets) {
  EXPECT_EQ(kUserSimTemplate, AssetBody("user_sim.txt"));
  EXPECT_EQ(kContrastTemplate, AssetBody("instruction_contrast.txt"));
  EXPECT_EQ(kEvaluatorTemplate, AssetBody("evaluator.txt"));
}

TEST(TemplatesTest, VerbatimInstructionLines) {
  const std::string u(kUserSimTemplate);
  EXPECT_EQ(u.rfind("Below is a dialogue between the user and the assistant. "
                    "Pretend you are the user in this conversation. What "
                    "question would you ask next?\n\n{{previous turns}}\n\n",
                    0),
            0u);
  EXPECT_NE(u.find("FIRST, provide a justification of the question you want "
                   "to ask.\n\nSECOND, on a new line, state only the "
                   "question.\n\nYour response should use the format:\n\n"
                   "Justification:\n\nQuestion:"),
            std::string::npos);
  EXPECT_NE(std::string(kContrastTemplate).find(kContrastBlock),
            std::string::npos);
  const std::string e(kEvaluatorTemplate);
  EXPECT_EQ(e.rfind("Please act as an impartial judge and evaluate the "
                    "quality of the conversation between the user and two AI "
                    "assistants displayed below.",
                    0),
            0u);
  EXPECT_NE(e.find("output your final verdict by strictly following this "
                   "format: \"[[A]]\" if assistant A is better, \"[[B]]\" if "
                   "assistant B is better.\n\n"
                   "[The Start of Assistant A's Conversation]\n\n"
                   "{{conversation A}}\n\n"
                   "[The End of Assistant A's Conversation]\n\n"
                   "[The Start of Assistant B's Conversation]\n\n"
                   "{{conversation B}}\n\n"
                   "[The End of Assistant B's Conversation]"),
            std::string::npos);
}

TEST(RenderTemplateTest, FillsSlotsOnce) {
  EXPECT_EQ(RenderTemplate("a {{x}} b {{y}} {{x}}", {{"x", "1"}, {"y", "2"}}),
            "a 1 b 2 1");
  // Inserted values are not rescanned.
  EXPECT_EQ(RenderTemplate("[{{x}}]", {{"x", "{{y}}"}}), "[{{y}}]");
}

TEST(RenderTemplateTest, FailsLoudly) {
  EXPECT_THROW(RenderTemplate("a {{x}}", {}), TemplateError);
  EXPECT_THROW(RenderTemplate("a {{x", {{"x", "1"}}), TemplateError);
}

TEST(SerializeTranscriptTest, Format) {
  EXPECT_EQ(SerializeTranscript(Conversation("c", {{"hi", "hello"},
                                                   {"more", "sure"}})),
            "User: hi\nAssistant: hello\nUser: more\nAssistant: sure\n");
}

TEST(RenderUserSimTest, OneTurnPrefix) {
  const std::string p =
      RenderUserSim(Conversation("c", {{"What is 2+2?", "It is 4."}}));
  EXPECT_NE(p.find("User: What is 2+2?\nAssistant: It is 4.\n"),
            std::string::npos);
  EXPECT_NE(p.find("\nQuestion:"), std::string::npos);
  EXPECT_EQ(p.find("{{"), std::string::npos);
  EXPECT_EQ(p, RenderUserSim(Conversation("c", {{"What is 2+2?", "It is 4."}})));
}

TEST(RenderUserSimTest, TurnsInOrder) {
  const std::string p = RenderUserSim(MakeConversation(3));
  std::size_t last = 0;
  for (int i = 0; i < 3; ++i) {
    for (const std::string s : {"c u", "c a"}) {
      const std::size_t at = p.find(s + std::to_string(i));
      ASSERT_NE(at, std::string::npos);
      EXPECT_GT(at, last);
      last = at;
    }
  }
}

TEST(RenderContrastTest, ContainsInstructionBlock) {
  const std::string p = RenderContrast(
      Conversation("c", {{"hello", "hi"}}), "Summarize the book");
  EXPECT_NE(p.find(kContrastBlock), std::string::npos);
  EXPECT_NE(p.find("User: hello\nAssistant: hi\nUser: Summarize the book\n"),
            std::string::npos);
}

TEST(RenderContrastTest, PeriodIsTheOnlyDifference) {
  const Conversation c = MakeConversation(1);
  const std::string a = RenderContrast(c, "Summarize the book");
  const std::string b = RenderContrast(c, "Summarize the book.");
  ASSERT_EQ(a.size() + 1, b.size());
  std::size_t i = 0;
  while (i < a.size() && a[i] == b[i]) ++i;
  EXPECT_EQ(b[i], '.');
  EXPECT_EQ(a.substr(i), b.substr(i + 1));
}

TEST(RenderContrastTest, FiveTurnsBeforeUtterance) {
  const std::string p = RenderContrast(MakeConversation(5), "next one");
  EXPECT_EQ(Count(p, "User: "), 6u);
  EXPECT_EQ(Count(p, "Assistant: "), 5u);
  EXPECT_GT(p.find("User: next one"), p.find("c a4"));
  EXPECT_THROW(RenderContrast(MakeConversation(1), ""), std::invalid_argument);
}

TEST(RenderEvaluatorTest, DelimitersAndSymmetry) {
  const Conversation a("a", {{"q", "first"}});
  const Conversation b("b", {{"q", "second"}});
  const std::string ab = RenderEvaluator(a, b);
  const std::string ba = RenderEvaluator(b, a);
  EXPECT_NE(ab.find(kEvaluatorStartA), std::string::npos);
  EXPECT_LT(ab.find("first"), ab.find("second"));
  EXPECT_LT(ba.find("second"), ba.find("first"));
  std::string swapped = ab;
  swapped.replace(swapped.find("first"), 5, "XXXXX");
  swapped.replace(swapped.find("second"), 6, "first");
  swapped.replace(swapped.find("XXXXX"), 5, "second");
  EXPECT_EQ(swapped, ba);

  const std::string same = RenderEvaluator(a, a);
  const auto body = [&](std::string_view start, std::string_view end) {
    const std::size_t s = same.find(start) + start.size();
    return same.substr(s, same.find(end) - s);
  };
  EXPECT_EQ(body(kEvaluatorStartA, kEvaluatorEndA),
            body(kEvaluatorStartB, kEvaluatorEndB));
}

TEST(AssistantTurnMessagesTest, AlternatesRoles) {
  const auto m = AssistantTurnMessages(MakeConversation(2), "now");
  ASSERT_EQ(m.size(), 5u);
  EXPECT_EQ(m[0].role, Role::kUser);
  EXPECT_EQ(m[1].role, Role::kAssistant);
  EXPECT_EQ(m[3].content, "c a1");
  EXPECT_EQ(m[4].role, Role::kUser);
  EXPECT_EQ(m[4].content, "now");
}

TEST(ParseUserSimTest, Examples) {
  auto q = ParseUserSim("Justification: because X\nQuestion: What next?");
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(*q, "What next?");
  auto empty = ParseUserSim("Question:   \n");
  ASSERT_FALSE(empty.has_value());
  EXPECT_EQ(empty.error().kind, PromptParseErrorKind::kEmptyQuestion);
  auto missing = ParseUserSim("I would ask about cats.");
  ASSERT_FALSE(missing.has_value());
  EXPECT_EQ(missing.error().kind, PromptParseErrorKind::kMissingMarker);
  auto later = ParseUserSim(
      "Justification: the format says Question: goes last\nQuestion: Real?");
  ASSERT_TRUE(later.has_value());
  EXPECT_EQ(*later, "Real?");
}

TEST(ParseUserSimTest, RecoversGeneratedQuestions) {
  Rng rng(77);
  for (int i = 0; i < 500; ++i) {
    std::string q = testing::RandomText(rng);
    if (q.find("Question:") != std::string::npos) continue;
    const std::string trimmed(
        q.substr(q.find_first_not_of(" \n"),
                 q.find_last_not_of(" \n") - q.find_first_not_of(" \n") + 1));
    const std::string out = "Justification: " + testing::RandomText(rng) +
                            "\nQuestion: " + q;
    auto parsed = ParseUserSim(out);
    ASSERT_TRUE(parsed.has_value()) << out;
    EXPECT_EQ(*parsed, trimmed);
  }
}

TEST(ParseContrastTest, Examples) {
  auto c = ParseContrast("Modified Instruction: Do Y\nAnswer: Here is Y.");
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->answer, "Here is Y.");
  EXPECT_EQ(c->modified_instruction, "Do Y");
  auto missing = ParseContrast("Modified Instruction: Do Y\nHere is Y.");
  ASSERT_FALSE(missing.has_value());
  EXPECT_EQ(missing.error().kind, PromptParseErrorKind::kMissingMarker);
  auto empty = ParseContrast("Modified Instruction: Do Y\nAnswer:\n  ");
  ASSERT_FALSE(empty.has_value());
  EXPECT_EQ(empty.error().kind, PromptParseErrorKind::kEmptyAnswer);
  auto multi = ParseContrast(
      "Modified Instruction: M\nAnswer: line one\nline two\nline three");
  ASSERT_TRUE(multi.has_value());
  EXPECT_EQ(multi->answer, "line one\nline two\nline three");
}

TEST(ParseVerdictTest, Examples) {
  EXPECT_EQ(ParseVerdict("...explanation... [[B]]").winner, Verdict::kB);
  EXPECT_EQ(ParseVerdict("no verdict here").winner, Verdict::kInvalid);
  EXPECT_EQ(ParseVerdict("[[A]] ... [[B]]").winner, Verdict::kB);
  EXPECT_EQ(ParseVerdict("[[B]] then [[A]]").winner, Verdict::kA);
  EXPECT_EQ(ParseVerdict("[A] or [[ A ]]").winner, Verdict::kInvalid);
  EXPECT_EQ(ParseVerdict("x [[A]]").raw_text, "x [[A]]");
  EXPECT_EQ(VerdictName(Verdict::kInvalid), "invalid");
}

TEST(ParsersTest, TotalOnArbitraryInput) {
  Rng rng(5);
  const std::vector<std::string> pieces = {"Question:", "Answer:", "[[A]]",
                                           "[[B]]", "Modified Instruction:",
                                           "\n", " ", "x"};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const std::size_t n = UniformIndex(rng, 10);
    for (std::size_t k = 0; k < n; ++k) {
      s += pieces[UniformIndex(rng, pieces.size())];
    }
    auto u = ParseUserSim(s);
    if (u) EXPECT_FALSE(u->empty());
    auto c = ParseContrast(s);
    if (c) EXPECT_FALSE(c->answer.empty());
    ParseVerdict(s);
  }
}

TEST(PromptSetTest, LoadsExternalDirectory) {
  TempDir dir;
  WriteFile(dir / "user_sim.txt", "US {{previous turns}} Question:\n");
  WriteFile(dir / "instruction_contrast.txt", "IC {{previous turns}}\n");
  WriteFile(dir / "evaluator.txt",
            "EV {{conversation A}} / {{conversation B}}\n");
  const PromptSet set = PromptSet::FromDirectory(dir.path());
  EXPECT_EQ(set.user_sim().body, "US {{previous turns}} Question:");
  EXPECT_EQ(RenderEvaluator(Conversation("a", {{"u", "x"}}),
                            Conversation("b", {{"u", "y"}}), set),
            "EV User: u\nAssistant: x\n / User: u\nAssistant: y\n");
}

TEST(PromptSetTest, ExternalDirectoryErrors) {
  TempDir dir;
  EXPECT_THROW(PromptSet::FromDirectory(dir.path()), IoError);
  WriteFile(dir / "user_sim.txt", "no slot here\n");
  WriteFile(dir / "instruction_contrast.txt", "IC {{previous turns}}\n");
  WriteFile(dir / "evaluator.txt",
            "EV {{conversation A}} / {{conversation B}}\n");
  EXPECT_THROW(PromptSet::FromDirectory(dir.path()), TemplateError);
}

TEST(PromptSetTest, AssetDirectoryEqualsEmbedded) {
  const PromptSet set = PromptSet::FromDirectory(MTPREF_PROMPT_ASSETS);
  EXPECT_EQ(set.user_sim().body, PromptSet::Embedded().user_sim().body);
  EXPECT_EQ(set.contrast().body, PromptSet::Embedded().contrast().body);
  EXPECT_EQ(set.evaluator().body, PromptSet::Embedded().evaluator().body);
}

}  // namespace
}  // namespace mtpref
