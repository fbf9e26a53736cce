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

#include <fstream>
#include <sstream>

#include "mtpref/jsonl.h"
#include "text_util.h"

namespace mtpref {

// Embedded copies of assets/prompts/*.txt; tests keep them in sync.
const std::string_view kUserSimTemplate = R"PROMPT(Below is a dialogue between the user and the assistant. Pretend you are the user in this conversation. What question would you ask next?

{{previous turns}}

### Instructions:

FIRST, provide a justification of the question you want to ask.

SECOND, on a new line, state only the question.

Your response should use the format:

Justification:

Question:)PROMPT";

const std::string_view kContrastTemplate = R"PROMPT(Below is a dialogue between the user and the assistant. Pretend you are the assistant in this conversation.

{{previous turns}}

### Instructions:

FIRST, generate a modified instruction that is highly relevant but not semantically identical to the instruction above from the user in the last turn.

SECOND, on a new line, generate a high-quality answer which is a good response to the modified instruction but not a good response to the original user question.

Your response should use the format:

Modified Instruction:

Answer:)PROMPT";

const std::string_view kEvaluatorTemplate = R"PROMPT(Please act as an impartial judge and evaluate the quality of the conversation between the user and two AI assistants displayed below. You should choose the assistant that follows the user's instructions and answers the user's questions better. Your evaluation should consider factors such as the helpfulness, relevance, accuracy, depth, creativity, and level of detail of their responses. Begin your evaluation by comparing the two conversations and provide a short explanation. Avoid any position biases and ensure that the order in which the conversations were presented does not influence your decision. Do not allow the length of the responses to influence your evaluation. Do not favor certain names of the assistants. Be as objective as possible. After providing your evaluation, output your final verdict by strictly following this format: "[[A]]" if assistant A is better, "[[B]]" if assistant B is better.

[The Start of Assistant A's Conversation]

{{conversation A}}

[The End of Assistant A's Conversation]

[The Start of Assistant B's Conversation]

{{conversation B}}

[The End of Assistant B's Conversation])PROMPT";

namespace {

constexpr std::string_view kPreviousTurns = "previous turns";
constexpr std::string_view kConversationA = "conversation A";
constexpr std::string_view kConversationB = "conversation B";

std::string ReadTemplateFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string body = buffer.str();
  if (!body.empty() && body.back() == '\n') body.pop_back();
  return body;
}

void RequireSlot(const std::string& body, std::string_view slot,
                 const std::filesystem::path& path) {
  const std::string needle = "{{" + std::string(slot) + "}}";
  if (body.find(needle) == std::string::npos) {
    throw TemplateError(path.string() + " lacks slot " + needle);
  }
}

std::string TextAfterLast(std::string_view text, std::string_view marker,
                          std::size_t pos) {
  return std::string(internal::Trim(text.substr(pos + marker.size())));
}

}  // namespace

std::string RenderTemplate(std::string_view body,
                           const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t open = body.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    const std::size_t close = body.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw TemplateError("unterminated '{{' in template");
    }
    out.append(body.substr(pos, open - pos));
    const std::string name(body.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) {
      throw TemplateError("unfilled template slot {{" + name + "}}");
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

const PromptSet& PromptSet::Embedded() {
  static const PromptSet* const kEmbedded = [] {
    auto* set = new PromptSet();
    set->user_sim_.body = std::string(kUserSimTemplate);
    set->contrast_.body = std::string(kContrastTemplate);
    set->evaluator_.body = std::string(kEvaluatorTemplate);
    return set;
  }();
  return *kEmbedded;
}

PromptSet PromptSet::FromDirectory(const std::filesystem::path& dir) {
  PromptSet set;
  const auto user_sim = dir / "user_sim.txt";
  const auto contrast = dir / "instruction_contrast.txt";
  const auto evaluator = dir / "evaluator.txt";
  set.user_sim_.body = ReadTemplateFile(user_sim);
  set.contrast_.body = ReadTemplateFile(contrast);
  set.evaluator_.body = ReadTemplateFile(evaluator);
  RequireSlot(set.user_sim_.body, kPreviousTurns, user_sim);
  RequireSlot(set.contrast_.body, kPreviousTurns, contrast);
  RequireSlot(set.evaluator_.body, kConversationA, evaluator);
  RequireSlot(set.evaluator_.body, kConversationB, evaluator);
  return set;
}

std::string SerializeTranscript(const Conversation& c) {
  std::string out;
  for (const Turn& t : c.turns()) {
    out += "User: ";
    out += t.user;
    out += "\nAssistant: ";
    out += t.assistant;
    out += '\n';
  }
  return out;
}

std::string RenderUserSim(const Conversation& prefix,
                          const PromptSet& prompts) {
  return RenderTemplate(
      prompts.user_sim().body,
      {{std::string(kPreviousTurns), SerializeTranscript(prefix)}});
}

std::string RenderContrast(const Conversation& prefix,
                           std::string_view user_utterance,
                           const PromptSet& prompts) {
  if (user_utterance.empty()) {
    throw std::invalid_argument("RenderContrast: empty user utterance");
  }
  std::string turns = SerializeTranscript(prefix);
  turns += "User: ";
  turns += user_utterance;
  turns += '\n';
  return RenderTemplate(prompts.contrast().body,
                        {{std::string(kPreviousTurns), std::move(turns)}});
}

std::string RenderEvaluator(const Conversation& conv_a,
                            const Conversation& conv_b,
                            const PromptSet& prompts) {
  return RenderTemplate(
      prompts.evaluator().body,
      {{std::string(kConversationA), SerializeTranscript(conv_a)},
       {std::string(kConversationB), SerializeTranscript(conv_b)}});
}

std::vector<ChatMessage> AssistantTurnMessages(const Conversation& context,
                                               std::string_view utterance) {
  std::vector<ChatMessage> messages;
  messages.reserve(2 * context.size() + 1);
  for (const Turn& t : context.turns()) {
    messages.push_back({Role::kUser, t.user});
    messages.push_back({Role::kAssistant, t.assistant});
  }
  messages.push_back({Role::kUser, std::string(utterance)});
  return messages;
}

Expected<std::string, PromptParseError> ParseUserSim(std::string_view output) {
  const std::size_t pos = internal::FindLast(output, kQuestionMarker);
  if (pos == std::string_view::npos) {
    return MakeUnexpected(PromptParseError{
        PromptParseErrorKind::kMissingMarker, "no 'Question:' marker"});
  }
  std::string question = TextAfterLast(output, kQuestionMarker, pos);
  if (question.empty()) {
    return MakeUnexpected(PromptParseError{
        PromptParseErrorKind::kEmptyQuestion, "empty question"});
  }
  return question;
}

Expected<ContrastOutput, PromptParseError> ParseContrast(
    std::string_view output) {
  const std::size_t pos = internal::FindLast(output, kAnswerMarker);
  if (pos == std::string_view::npos) {
    return MakeUnexpected(PromptParseError{
        PromptParseErrorKind::kMissingMarker, "no 'Answer:' marker"});
  }
  ContrastOutput parsed;
  parsed.answer = TextAfterLast(output, kAnswerMarker, pos);
  if (parsed.answer.empty()) {
    return MakeUnexpected(
        PromptParseError{PromptParseErrorKind::kEmptyAnswer, "empty answer"});
  }
  const std::string_view head = output.substr(0, pos);
  const std::size_t mod = internal::FindLast(head, kModifiedInstructionMarker);
  if (mod != std::string_view::npos) {
    parsed.modified_instruction =
        TextAfterLast(head, kModifiedInstructionMarker, mod);
  }
  return parsed;
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kA:
      return "A";
    case Verdict::kB:
      return "B";
    case Verdict::kInvalid:
      return "invalid";
  }
  return "invalid";
}

JudgeVerdict ParseVerdict(std::string_view output) {
  JudgeVerdict verdict;
  verdict.raw_text = std::string(output);
  const std::size_t a = internal::FindLast(output, kVerdictA);
  const std::size_t b = internal::FindLast(output, kVerdictB);
  if (a == std::string_view::npos && b == std::string_view::npos) {
    verdict.winner = Verdict::kInvalid;
  } else if (b == std::string_view::npos) {
    verdict.winner = Verdict::kA;
  } else if (a == std::string_view::npos) {
    verdict.winner = Verdict::kB;
  } else {
    verdict.winner = a > b ? Verdict::kA : Verdict::kB;
  }
  return verdict;
}

}  // namespace mtpref
