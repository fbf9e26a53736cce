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

// Chat-completion backends. Every simulator, assistant and judge call in the
// pipeline goes through ChatBackend::Complete, which owns precondition checks
// and the retry policy. Two implementations exist: an HTTP client speaking
// the common chat-completions wire format, and a deterministic mock used for
// offline runs and tests.

#ifndef MTPREF_GATEWAY_H_
#define MTPREF_GATEWAY_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtpref/expected.h"

namespace mtpref {

enum class Role { kUser, kAssistant, kSystem };

std::string_view RoleName(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct SamplingConfig {
  double temperature = 0.7;
  int max_output_tokens = 1024;
  // Mock backends are a pure function of (messages, seed) when temperature is
  // positive and of messages alone at temperature 0. The HTTP wire format has
  // no seed field, so remote backends ignore it.
  std::optional<std::uint64_t> seed;
};

struct RetryPolicy {
  int max_attempts = 3;
  // Delay before retry k (k >= 1) is backoff_ms * 2^(k-1).
  int backoff_ms = 250;
};

enum class BackendKind { kHttp, kMock };

enum class MockMode {
  kEcho,      // "echo: <last user content>"
  kScript,    // answers served in call order from a preloaded queue
  kTemplate,  // deterministic well-formed replies to the prompt-kit formats
};

std::optional<MockMode> ParseMockMode(std::string_view name);
std::string_view MockModeName(MockMode mode);

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::optional<std::string> endpoint_url;
  std::string model_name = "mock";
  // Name of the environment variable holding the bearer token. Keys are never
  // read from config values.
  std::optional<std::string> api_key_env_var;
  RetryPolicy retry;
  double timeout_seconds = 120.0;

  MockMode mock_mode = MockMode::kTemplate;
  std::vector<std::string> script;
  bool script_cycle = false;
};

// Throws std::invalid_argument describing the first problem.
void ValidateBackendConfig(const BackendConfig& config);

enum class BackendErrorKind {
  kInvalidRequest,   // precondition violated; never retried
  kTransient,        // network failure, 5xx, 408, 429
  kPermanent,        // other 4xx, malformed response, exhausted script
  kEmptyCompletion,  // retried like a transient failure
};

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what,
               int attempts = 1)
      : std::runtime_error(what), kind_(kind), attempts_(attempts) {}

  BackendErrorKind kind() const { return kind_; }
  int attempts() const { return attempts_; }
  bool retryable() const {
    return kind_ == BackendErrorKind::kTransient ||
           kind_ == BackendErrorKind::kEmptyCompletion;
  }

 private:
  BackendErrorKind kind_;
  int attempts_;
};

class ChatBackend {
 public:
  explicit ChatBackend(RetryPolicy retry) : retry_(retry) {}
  virtual ~ChatBackend() = default;
  ChatBackend(const ChatBackend&) = delete;
  ChatBackend& operator=(const ChatBackend&) = delete;

  // Requires a nonempty message list whose last message has role kUser and
  // nonempty contents. Retries transient failures and empty completions up
  // to retry().max_attempts attempts with exponential backoff. Returns a
  // nonempty completion or throws BackendError. Safe to call concurrently.
  std::string Complete(std::span<const ChatMessage> messages,
                       const SamplingConfig& sampling);

  const RetryPolicy& retry() const { return retry_; }

  // Total attempts made, including retries.
  std::size_t attempts() const { return attempts_.load(); }

 protected:
  // One attempt. Signals failure by throwing BackendError.
  virtual std::string Attempt(std::span<const ChatMessage> messages,
                              const SamplingConfig& sampling) = 0;

 private:
  RetryPolicy retry_;
  std::atomic<std::size_t> attempts_{0};
};

using MockResponder = std::function<std::string(
    std::span<const ChatMessage> messages, const SamplingConfig& sampling,
    std::size_t call_index)>;

class MockBackend : public ChatBackend {
 public:
  // Script entries with these exact contents raise the matching failure
  // instead of answering; an empty entry is an empty completion.
  static constexpr std::string_view kFailTransient = "<<fail:transient>>";
  static constexpr std::string_view kFailPermanent = "<<fail:permanent>>";

  static std::unique_ptr<MockBackend> Echo(RetryPolicy retry = {});
  static std::unique_ptr<MockBackend> Script(std::vector<std::string> answers,
                                             bool cycle = false,
                                             RetryPolicy retry = {});
  static std::unique_ptr<MockBackend> Template(RetryPolicy retry = {});
  // Arbitrary responder, for fault injection and bespoke fixtures.
  static std::unique_ptr<MockBackend> Custom(MockResponder responder,
                                             RetryPolicy retry = {});

  MockMode mode() const { return mode_; }

 protected:
  std::string Attempt(std::span<const ChatMessage> messages,
                      const SamplingConfig& sampling) override;

 private:
  MockBackend(MockMode mode, RetryPolicy retry);

  MockMode mode_;
  std::vector<std::string> script_;
  bool cycle_ = false;
  MockResponder responder_;
  std::mutex mu_;
  std::size_t next_call_ = 0;
};

// Deterministic reply used by MockMode::kTemplate. Recognizes the user
// simulator, instruction contrast and evaluator prompts and answers in their
// structured formats; anything else gets an assistant-style reply. Sampled
// replies (temperature > 0) vary in quality with the seed; contrast answers
// drift to an unrelated topic and are truncated.
std::string TemplateMockReply(std::span<const ChatMessage> messages,
                              const SamplingConfig& sampling);

class HttpBackend : public ChatBackend {
 public:
  // Throws std::invalid_argument on a bad config or unparseable URL.
  explicit HttpBackend(BackendConfig config);

  // Request body sent for `messages`; exposed for tests.
  std::string RequestBody(std::span<const ChatMessage> messages,
                          const SamplingConfig& sampling) const;

 protected:
  std::string Attempt(std::span<const ChatMessage> messages,
                      const SamplingConfig& sampling) override;

 private:
  BackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

std::unique_ptr<ChatBackend> MakeBackend(const BackendConfig& config);

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  SamplingConfig sampling;
};

using CompletionResult = Expected<std::string, BackendError>;

// Runs every request with at most `max_in_flight` outstanding. Output slot i
// holds the result for requests[i]; a failure only affects its own slot.
// Throws std::invalid_argument if max_in_flight is zero.
std::vector<CompletionResult> CompleteBatch(
    ChatBackend& backend, std::span<const CompletionRequest> requests,
    std::size_t max_in_flight);

std::vector<CompletionResult> CompleteBatch(
    ChatBackend& backend, std::span<const std::vector<ChatMessage>> requests,
    const SamplingConfig& sampling, std::size_t max_in_flight);

}  // namespace mtpref

#endif  // MTPREF_GATEWAY_H_
