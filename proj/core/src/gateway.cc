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

#include "mtpref/gateway.h"

#include <chrono>
#include <thread>

#include "mtpref/parallel.h"
#include "text_util.h"

namespace mtpref {

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
    case Role::kSystem:
      return "system";
  }
  return "user";
}

std::optional<MockMode> ParseMockMode(std::string_view name) {
  if (name == "echo") return MockMode::kEcho;
  if (name == "script") return MockMode::kScript;
  if (name == "template") return MockMode::kTemplate;
  return std::nullopt;
}

std::string_view MockModeName(MockMode mode) {
  switch (mode) {
    case MockMode::kEcho:
      return "echo";
    case MockMode::kScript:
      return "script";
    case MockMode::kTemplate:
      return "template";
  }
  return "template";
}

void ValidateBackendConfig(const BackendConfig& config) {
  if (config.retry.max_attempts < 1) {
    throw std::invalid_argument("retry.max_attempts must be >= 1");
  }
  if (config.retry.backoff_ms < 0) {
    throw std::invalid_argument("retry.backoff_ms must be >= 0");
  }
  if (config.kind == BackendKind::kHttp) {
    if (!config.endpoint_url || config.endpoint_url->empty()) {
      throw std::invalid_argument("http backend requires endpoint_url");
    }
    if (config.model_name.empty()) {
      throw std::invalid_argument("http backend requires model_name");
    }
    if (config.timeout_seconds <= 0) {
      throw std::invalid_argument("timeout_seconds must be positive");
    }
  }
  if (config.kind == BackendKind::kMock &&
      config.mock_mode == MockMode::kScript && config.script.empty()) {
    throw std::invalid_argument("script mock requires a nonempty script");
  }
}

std::string ChatBackend::Complete(std::span<const ChatMessage> messages,
                                  const SamplingConfig& sampling) {
  if (messages.empty()) {
    throw BackendError(BackendErrorKind::kInvalidRequest, "no messages");
  }
  if (messages.back().role != Role::kUser) {
    throw BackendError(BackendErrorKind::kInvalidRequest,
                       "last message must have role user");
  }
  for (const ChatMessage& m : messages) {
    if (m.content.empty()) {
      throw BackendError(BackendErrorKind::kInvalidRequest,
                         "message content must be nonempty");
    }
  }
  if (sampling.temperature < 0 || sampling.max_output_tokens <= 0) {
    throw BackendError(BackendErrorKind::kInvalidRequest,
                       "invalid sampling config");
  }

  for (int attempt = 1;; ++attempt) {
    ++attempts_;
    try {
      std::string text = Attempt(messages, sampling);
      if (internal::Trim(text).empty()) {
        throw BackendError(BackendErrorKind::kEmptyCompletion,
                           "empty completion");
      }
      return text;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= retry_.max_attempts) {
        throw BackendError(e.kind(), e.what(), attempt);
      }
    }
    if (retry_.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long long>(retry_.backoff_ms) << (attempt - 1)));
    }
  }
}

MockBackend::MockBackend(MockMode mode, RetryPolicy retry)
    : ChatBackend(retry), mode_(mode) {}

std::unique_ptr<MockBackend> MockBackend::Echo(RetryPolicy retry) {
  return std::unique_ptr<MockBackend>(new MockBackend(MockMode::kEcho, retry));
}

std::unique_ptr<MockBackend> MockBackend::Script(
    std::vector<std::string> answers, bool cycle, RetryPolicy retry) {
  auto backend =
      std::unique_ptr<MockBackend>(new MockBackend(MockMode::kScript, retry));
  backend->script_ = std::move(answers);
  backend->cycle_ = cycle;
  return backend;
}

std::unique_ptr<MockBackend> MockBackend::Template(RetryPolicy retry) {
  return std::unique_ptr<MockBackend>(
      new MockBackend(MockMode::kTemplate, retry));
}

std::unique_ptr<MockBackend> MockBackend::Custom(MockResponder responder,
                                                 RetryPolicy retry) {
  // Custom responders report as script mode; they are only built in code.
  auto backend =
      std::unique_ptr<MockBackend>(new MockBackend(MockMode::kScript, retry));
  backend->responder_ = std::move(responder);
  return backend;
}

std::string MockBackend::Attempt(std::span<const ChatMessage> messages,
                                 const SamplingConfig& sampling) {
  if (responder_) {
    std::size_t index;
    {
      std::lock_guard<std::mutex> lock(mu_);
      index = next_call_++;
    }
    return responder_(messages, sampling, index);
  }
  switch (mode_) {
    case MockMode::kEcho:
      return "echo: " + messages.back().content;
    case MockMode::kTemplate:
      return TemplateMockReply(messages, sampling);
    case MockMode::kScript: {
      std::string answer;
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (next_call_ >= script_.size() && !cycle_) {
          throw BackendError(BackendErrorKind::kPermanent,
                             "mock script exhausted");
        }
        answer = script_[next_call_ % script_.size()];
        ++next_call_;
      }
      if (answer == kFailTransient) {
        throw BackendError(BackendErrorKind::kTransient,
                           "scripted transient failure");
      }
      if (answer == kFailPermanent) {
        throw BackendError(BackendErrorKind::kPermanent,
                           "scripted permanent failure");
      }
      return answer;
    }
  }
  return {};
}

std::unique_ptr<ChatBackend> MakeBackend(const BackendConfig& config) {
  ValidateBackendConfig(config);
  if (config.kind == BackendKind::kHttp) {
    return std::make_unique<HttpBackend>(config);
  }
  switch (config.mock_mode) {
    case MockMode::kEcho:
      return MockBackend::Echo(config.retry);
    case MockMode::kScript:
      return MockBackend::Script(config.script, config.script_cycle,
                                 config.retry);
    case MockMode::kTemplate:
      return MockBackend::Template(config.retry);
  }
  return MockBackend::Template(config.retry);
}

std::vector<CompletionResult> CompleteBatch(
    ChatBackend& backend, std::span<const CompletionRequest> requests,
    std::size_t max_in_flight) {
  if (max_in_flight == 0) {
    throw std::invalid_argument("CompleteBatch: max_in_flight must be >= 1");
  }
  std::vector<std::optional<CompletionResult>> slots(requests.size());
  ParallelFor(requests.size(), max_in_flight, [&](std::size_t i) {
    try {
      slots[i].emplace(backend.Complete(requests[i].messages,
                                        requests[i].sampling));
    } catch (const BackendError& e) {
      slots[i].emplace(MakeUnexpected(e));
    } catch (const std::exception& e) {
      slots[i].emplace(
          MakeUnexpected(BackendError(BackendErrorKind::kPermanent, e.what())));
    }
  });
  std::vector<CompletionResult> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::vector<CompletionResult> CompleteBatch(
    ChatBackend& backend, std::span<const std::vector<ChatMessage>> requests,
    const SamplingConfig& sampling, std::size_t max_in_flight) {
  std::vector<CompletionRequest> full;
  full.reserve(requests.size());
  for (const auto& messages : requests) full.push_back({messages, sampling});
  return CompleteBatch(backend, full, max_in_flight);
}

}  // namespace mtpref
