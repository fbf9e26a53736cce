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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <unordered_set>

#include <httplib.h>

#include "mtpref/prompts.h"
#include "mtpref/reward_model.h"
#include "text_util.h"

namespace mtpref {
namespace {

constexpr std::array<std::string_view, 14> kConstraintKeywords = {
    "must",   "exactly", "only",  "never",  "always", "without", "include",
    "format", "least",   "most",  "limit",  "words",  "should",  "avoid"};

bool IsConstraintKeyword(const std::string& w) {
  return std::find(kConstraintKeywords.begin(), kConstraintKeywords.end(),
                   w) != kConstraintKeywords.end();
}

double CountChar(std::string_view s, char c) {
  return static_cast<double>(std::count(s.begin(), s.end(), c));
}

}  // namespace

Json FeaturizerSpecToJson(const FeaturizerSpec& spec) {
  Json j;
  switch (spec.kind) {
    case FeaturizerKind::kHashedBagOfTokens:
      j["kind"] = "hashed_bow";
      break;
    case FeaturizerKind::kStructuralStats:
      j["kind"] = "structural";
      break;
    case FeaturizerKind::kRemoteEmbedding:
      j["kind"] = "remote_embedding";
      j["endpoint_url"] = spec.endpoint_url.value_or("");
      j["model"] = spec.model_name;
      if (spec.api_key_env_var) j["api_key_env_var"] = *spec.api_key_env_var;
      break;
  }
  j["dim"] = spec.dim;
  return j;
}

FeaturizerSpec FeaturizerSpecFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw SchemaError("featurizer needs a string 'kind'");
  }
  FeaturizerSpec spec;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "hashed_bow") {
    spec.kind = FeaturizerKind::kHashedBagOfTokens;
    spec.dim = j.value("dim", static_cast<std::size_t>(1024));
  } else if (kind == "structural") {
    spec.kind = FeaturizerKind::kStructuralStats;
    spec.dim = StructuralStatsFeaturizer::kDim;
    if (j.contains("dim") && j["dim"].get<std::size_t>() != spec.dim) {
      throw SchemaError("structural featurizer has dim 8");
    }
  } else if (kind == "remote_embedding") {
    spec.kind = FeaturizerKind::kRemoteEmbedding;
    if (!j.contains("endpoint_url") || !j.contains("dim")) {
      throw SchemaError("remote_embedding needs endpoint_url and dim");
    }
    spec.endpoint_url = j["endpoint_url"].get<std::string>();
    spec.dim = j["dim"].get<std::size_t>();
    spec.model_name = j.value("model", std::string());
    if (j.contains("api_key_env_var")) {
      spec.api_key_env_var = j["api_key_env_var"].get<std::string>();
    }
    spec.timeout_seconds = j.value("timeout_seconds", 60.0);
  } else {
    throw SchemaError("unknown featurizer kind '" + kind + "'");
  }
  if (spec.dim == 0) throw SchemaError("featurizer dim must be positive");
  return spec;
}

HashedBagOfTokensFeaturizer::HashedBagOfTokensFeaturizer(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("hashed featurizer: dim == 0");
  spec_.kind = FeaturizerKind::kHashedBagOfTokens;
  spec_.dim = dim;
}

std::vector<double> HashedBagOfTokensFeaturizer::Counts(
    const Conversation& c) const {
  std::vector<double> counts(spec_.dim, 0.0);
  auto add = [&](std::string_view tag, const std::string& text) {
    for (const std::string& w : internal::Words(text)) {
      const std::string key = std::string(tag) + w;
      ++counts[internal::Fnv1a64(key) % spec_.dim];
    }
  };
  for (const Turn& t : c.turns()) {
    add("u:", t.user);
    add("a:", t.assistant);
  }
  return counts;
}

std::vector<double> HashedBagOfTokensFeaturizer::Featurize(
    const Conversation& c) const {
  std::vector<double> v = Counts(c);
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

StructuralStatsFeaturizer::StructuralStatsFeaturizer() {
  spec_.kind = FeaturizerKind::kStructuralStats;
  spec_.dim = kDim;
}

std::vector<double> StructuralStatsFeaturizer::Featurize(
    const Conversation& c) const {
  std::vector<double> f(kDim, 0.0);
  if (c.empty()) return f;
  const double turns = static_cast<double>(c.size());
  double assistant_words = 0, max_assistant_words = 0, user_words = 0;
  double relevance = 0, prior_overlap = 0, question_marks = 0, constraints = 0;
  std::unordered_set<std::string> seen;
  for (const Turn& t : c.turns()) {
    const auto user = internal::Words(t.user);
    const auto reply = internal::Words(t.assistant);
    assistant_words += static_cast<double>(reply.size());
    max_assistant_words =
        std::max(max_assistant_words, static_cast<double>(reply.size()));
    user_words += static_cast<double>(user.size());
    question_marks += CountChar(t.user, '?');
    for (const std::string& w : user) constraints += IsConstraintKeyword(w);

    const auto user_content = internal::ContentWords(t.user);
    const auto reply_content = internal::ContentWords(t.assistant);
    const std::unordered_set<std::string> reply_set(reply_content.begin(),
                                                    reply_content.end());
    const std::unordered_set<std::string> user_set(user_content.begin(),
                                                   user_content.end());
    if (!user_set.empty()) {
      std::size_t hits = 0;
      for (const auto& w : user_set) hits += reply_set.count(w);
      relevance += static_cast<double>(hits) /
                   static_cast<double>(user_set.size());
    }
    seen.insert(user_set.begin(), user_set.end());
    if (!reply_content.empty()) {
      std::size_t hits = 0;
      for (const auto& w : reply_content) hits += seen.count(w);
      prior_overlap += static_cast<double>(hits) /
                       static_cast<double>(reply_content.size());
    }
    seen.insert(reply_set.begin(), reply_set.end());
  }
  f[0] = turns;
  f[1] = assistant_words / turns / 50.0;
  f[2] = max_assistant_words / 100.0;
  f[3] = user_words / turns / 25.0;
  f[4] = relevance / turns;
  f[5] = prior_overlap / turns;
  if (user_words > 0) {
    f[6] = question_marks / user_words * 10.0;
    f[7] = constraints / user_words * 10.0;
  }
  return f;
}

RemoteEmbeddingFeaturizer::RemoteEmbeddingFeaturizer(FeaturizerSpec spec)
    : spec_(std::move(spec)) {
  if (spec_.kind != FeaturizerKind::kRemoteEmbedding || !spec_.endpoint_url ||
      spec_.dim == 0) {
    throw std::invalid_argument("remote featurizer needs endpoint_url and dim");
  }
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)",
                               std::regex::icase);
  std::smatch match;
  if (!std::regex_match(*spec_.endpoint_url, match, kUrl)) {
    throw std::invalid_argument("unparseable endpoint_url: " +
                                *spec_.endpoint_url);
  }
  scheme_host_port_ = match[1].str();
  path_ = match[2].matched ? match[2].str() : "/";
}

std::vector<double> RemoteEmbeddingFeaturizer::Featurize(
    const Conversation& c) const {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(spec_.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Headers headers;
  if (spec_.api_key_env_var) {
    if (const char* token = std::getenv(spec_.api_key_env_var->c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  nlohmann::json body{{"model", spec_.model_name},
                      {"input", SerializeTranscript(c)}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw FeaturizerError("embedding request failed: " +
                          httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw FeaturizerError("embedding endpoint returned HTTP " +
                          std::to_string(res->status));
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("data") ||
      !parsed["data"].is_array() || parsed["data"].empty() ||
      !parsed["data"][0].contains("embedding")) {
    throw FeaturizerError("embedding response lacks data[0].embedding");
  }
  const auto& emb = parsed["data"][0]["embedding"];
  if (!emb.is_array() || emb.size() != spec_.dim) {
    throw FeaturizerError("embedding has wrong length");
  }
  std::vector<double> v;
  v.reserve(spec_.dim);
  for (const auto& x : emb) {
    if (!x.is_number()) throw FeaturizerError("non-numeric embedding entry");
    v.push_back(x.get<double>());
  }
  return v;
}

std::unique_ptr<Featurizer> MakeFeaturizer(const FeaturizerSpec& spec) {
  switch (spec.kind) {
    case FeaturizerKind::kHashedBagOfTokens:
      return std::make_unique<HashedBagOfTokensFeaturizer>(spec.dim);
    case FeaturizerKind::kStructuralStats:
      return std::make_unique<StructuralStatsFeaturizer>();
    case FeaturizerKind::kRemoteEmbedding:
      return std::make_unique<RemoteEmbeddingFeaturizer>(spec);
  }
  throw std::invalid_argument("unknown featurizer kind");
}

}  // namespace mtpref
