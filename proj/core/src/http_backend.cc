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

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mtpref/gateway.h"

namespace mtpref {
namespace {

bool IsTransientStatus(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config)
    : ChatBackend(config.retry), config_(std::move(config)) {
  ValidateBackendConfig(config_);
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)",
                               std::regex::icase);
  std::smatch match;
  if (!std::regex_match(*config_.endpoint_url, match, kUrl)) {
    throw std::invalid_argument("unparseable endpoint_url: " +
                                *config_.endpoint_url);
  }
  scheme_host_port_ = match[1].str();
  path_ = match[2].matched ? match[2].str() : "/";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_host_port_.rfind("https", 0) == 0 ||
      scheme_host_port_.rfind("HTTPS", 0) == 0) {
    throw std::invalid_argument("https endpoints need a TLS-enabled build");
  }
#endif
}

std::string HttpBackend::RequestBody(std::span<const ChatMessage> messages,
                                     const SamplingConfig& sampling) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model_name;
  body["messages"] = nlohmann::ordered_json::array();
  for (const ChatMessage& m : messages) {
    body["messages"].push_back(
        {{"role", std::string(RoleName(m.role))}, {"content", m.content}});
  }
  body["temperature"] = sampling.temperature;
  body["max_tokens"] = sampling.max_output_tokens;
  return body.dump();
}

std::string HttpBackend::Attempt(std::span<const ChatMessage> messages,
                                 const SamplingConfig& sampling) {
  // One client per attempt: httplib clients are not safe to share across
  // threads, and this keeps an abandoned call from affecting later ones.
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  httplib::Headers headers;
  if (config_.api_key_env_var) {
    if (const char* token = std::getenv(config_.api_key_env_var->c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  auto res = client.Post(path_, headers, RequestBody(messages, sampling),
                         "application/json");
  if (!res) {
    throw BackendError(BackendErrorKind::kTransient,
                       "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(IsTransientStatus(res->status)
                           ? BackendErrorKind::kTransient
                           : BackendErrorKind::kPermanent,
                       "HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 200));
  }
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr,
                                                /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw BackendError(BackendErrorKind::kPermanent,
                       "response is not valid JSON");
  }
  const nlohmann::json* content = nullptr;
  if (parsed.contains("choices") && parsed["choices"].is_array() &&
      !parsed["choices"].empty()) {
    const auto& first = parsed["choices"][0];
    if (first.contains("message") && first["message"].contains("content")) {
      content = &first["message"]["content"];
    }
  }
  if (content == nullptr || !content->is_string()) {
    throw BackendError(BackendErrorKind::kPermanent,
                       "response lacks choices[0].message.content");
  }
  return content->get<std::string>();
}

}  // namespace mtpref
