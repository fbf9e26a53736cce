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

// Prompt templates for the user simulator, instruction contrast and
// evaluator calls, plus strict parsers for their structured outputs.
//
// Conversations are serialized into `{{previous turns}}` and
// `{{conversation X}}` slots as "User: <text>\nAssistant: <text>\n" per turn.
// Parsers take the LAST occurrence of each marker so that markers echoed
// inside a justification do not confuse them.

#ifndef MTPREF_PROMPTS_H_
#define MTPREF_PROMPTS_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtpref/conversation.h"
#include "mtpref/expected.h"
#include "mtpref/gateway.h"

namespace mtpref {

enum class PromptKind { kUserSim, kAssistantTurn, kInstructionContrast,
                        kEvaluator };

struct PromptTemplate {
  PromptKind kind;
  std::string body;
};

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Substitutes every `{{name}}` slot in `body` with values.at(name). Inserted
// values are not rescanned. Throws TemplateError naming the first slot
// without a value, or on an unterminated `{{`.
std::string RenderTemplate(std::string_view body,
                           const std::map<std::string, std::string>& values);

// The three text templates used by the pipeline. The assistant turn has no
// text template: it is sent as alternating role-tagged messages.
class PromptSet {
 public:
  static const PromptSet& Embedded();

  // Loads user_sim.txt, instruction_contrast.txt and evaluator.txt from
  // `dir`. A single trailing newline per file is dropped. Throws IoError when
  // a file is missing and TemplateError when a required slot is absent.
  static PromptSet FromDirectory(const std::filesystem::path& dir);

  const PromptTemplate& user_sim() const { return user_sim_; }
  const PromptTemplate& contrast() const { return contrast_; }
  const PromptTemplate& evaluator() const { return evaluator_; }

 private:
  PromptTemplate user_sim_{PromptKind::kUserSim, {}};
  PromptTemplate contrast_{PromptKind::kInstructionContrast, {}};
  PromptTemplate evaluator_{PromptKind::kEvaluator, {}};
};

// Verbatim embedded bodies.
extern const std::string_view kUserSimTemplate;
extern const std::string_view kContrastTemplate;
extern const std::string_view kEvaluatorTemplate;

// Substrings that identify each rendered prompt (used by the template mock).
inline constexpr std::string_view kUserSimMarker =
    "Pretend you are the user in this conversation.";
inline constexpr std::string_view kContrastMarker =
    "Pretend you are the assistant in this conversation.";
inline constexpr std::string_view kEvaluatorStartA =
    "[The Start of Assistant A's Conversation]";
inline constexpr std::string_view kEvaluatorEndA =
    "[The End of Assistant A's Conversation]";
inline constexpr std::string_view kEvaluatorStartB =
    "[The Start of Assistant B's Conversation]";
inline constexpr std::string_view kEvaluatorEndB =
    "[The End of Assistant B's Conversation]";

inline constexpr std::string_view kQuestionMarker = "Question:";
inline constexpr std::string_view kModifiedInstructionMarker =
    "Modified Instruction:";
inline constexpr std::string_view kAnswerMarker = "Answer:";
inline constexpr std::string_view kVerdictA = "[[A]]";
inline constexpr std::string_view kVerdictB = "[[B]]";

std::string SerializeTranscript(const Conversation& c);

std::string RenderUserSim(const Conversation& prefix,
                          const PromptSet& prompts = PromptSet::Embedded());

// The utterance is appended to the transcript as the final user line.
std::string RenderContrast(const Conversation& prefix,
                           std::string_view user_utterance,
                           const PromptSet& prompts = PromptSet::Embedded());

std::string RenderEvaluator(const Conversation& conv_a,
                            const Conversation& conv_b,
                            const PromptSet& prompts = PromptSet::Embedded());

// Alternating user/assistant messages for `context`, ending with the new
// user utterance.
std::vector<ChatMessage> AssistantTurnMessages(const Conversation& context,
                                               std::string_view utterance);

enum class PromptParseErrorKind { kMissingMarker, kEmptyQuestion,
                                  kEmptyAnswer };

struct PromptParseError {
  PromptParseErrorKind kind;
  std::string message;
};

Expected<std::string, PromptParseError> ParseUserSim(std::string_view output);

struct ContrastOutput {
  std::string answer;
  // Diagnostic only; never persisted into a conversation.
  std::string modified_instruction;
};

Expected<ContrastOutput, PromptParseError> ParseContrast(
    std::string_view output);

enum class Verdict { kA, kB, kInvalid };

std::string_view VerdictName(Verdict v);  // "A", "B", "invalid"

struct JudgeVerdict {
  Verdict winner = Verdict::kInvalid;
  std::string raw_text;
};

// The final verdict token decides: "[[A]] ... [[B]]" is B.
JudgeVerdict ParseVerdict(std::string_view output);

}  // namespace mtpref

#endif  // MTPREF_PROMPTS_H_
