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

// JSONL persistence. One JSON object per line, UTF-8. Pair records follow
//
//   {"id": str, "source": "original"|"music", "seed_id": str|null,
//    "shared_prefix_len": int, "chosen": [{"user": str, "assistant": str}],
//    "rejected": [...]}
//
// with an optional "category": str used by evaluation sets.

#ifndef MTPREF_JSONL_H_
#define MTPREF_JSONL_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtpref/conversation.h"

namespace mtpref {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by the *FromJson functions on schema violations.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JsonlError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

template <typename T>
struct JsonlReadResult {
  std::vector<T> records;
  std::vector<JsonlError> errors;
};

Json TurnsToJson(const Conversation& c);
Conversation ConversationFromJson(const Json& turns, std::string id);
Json PairToJson(const PreferencePair& pair);
PreferencePair PairFromJson(const Json& record);

// Invokes `on_record` for every non-blank line. Lines that fail to parse, or
// for which `on_record` throws SchemaError or a json exception, are reported
// with their line number and skipped. Throws IoError if the file cannot be
// opened.
std::vector<JsonlError> ForEachJsonlRecord(
    const std::filesystem::path& path,
    const std::function<void(const Json&)>& on_record);

JsonlReadResult<PreferencePair> ReadPairsJsonl(
    const std::filesystem::path& path);

// Writes one compact JSON object per line, replacing the file. Throws IoError.
void WriteJsonl(const std::filesystem::path& path, std::span<const Json> rows);
void WritePairsJsonl(const std::filesystem::path& path,
                     std::span<const PreferencePair> pairs);

void WriteJsonFile(const std::filesystem::path& path, const Json& value);
Json ReadJsonFile(const std::filesystem::path& path);

}  // namespace mtpref

#endif  // MTPREF_JSONL_H_
