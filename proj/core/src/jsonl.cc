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

#include "mtpref/jsonl.h"

#include <fstream>
#include <sstream>

namespace mtpref {
namespace {

const std::string& RequireString(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(std::string("missing or non-string field '") + key +
                      "'");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

Json TurnsToJson(const Conversation& c) {
  Json turns = Json::array();
  for (const Turn& t : c.turns()) {
    turns.push_back(Json{{"user", t.user}, {"assistant", t.assistant}});
  }
  return turns;
}

Conversation ConversationFromJson(const Json& turns, std::string id) {
  if (!turns.is_array()) throw SchemaError("conversation must be an array");
  std::vector<Turn> out;
  out.reserve(turns.size());
  for (const Json& t : turns) {
    if (!t.is_object()) throw SchemaError("turn must be an object");
    // A turn without an assistant reply is a trailing user-only message,
    // which is rejected at ingest.
    out.push_back(Turn{RequireString(t, "user"), RequireString(t, "assistant")});
  }
  return Conversation(std::move(id), std::move(out));
}

Json PairToJson(const PreferencePair& pair) {
  Json j;
  j["id"] = pair.id;
  j["source"] = std::string(PairSourceName(pair.source));
  j["seed_id"] = pair.seed_id ? Json(*pair.seed_id) : Json(nullptr);
  j["shared_prefix_len"] = pair.shared_prefix_len;
  j["chosen"] = TurnsToJson(pair.chosen);
  j["rejected"] = TurnsToJson(pair.rejected);
  if (pair.category) j["category"] = *pair.category;
  return j;
}

PreferencePair PairFromJson(const Json& record) {
  if (!record.is_object()) throw SchemaError("record must be an object");
  PreferencePair pair;
  pair.id = RequireString(record, "id");
  auto source = ParsePairSource(RequireString(record, "source"));
  if (!source) throw SchemaError("unknown source");
  pair.source = *source;
  if (auto it = record.find("seed_id"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("seed_id must be string or null");
    pair.seed_id = it->get<std::string>();
  }
  auto prefix = record.find("shared_prefix_len");
  if (prefix == record.end() || !prefix->is_number_integer() ||
      prefix->get<long long>() < 0) {
    throw SchemaError("shared_prefix_len must be a nonnegative integer");
  }
  pair.shared_prefix_len = prefix->get<std::size_t>();
  auto chosen = record.find("chosen");
  auto rejected = record.find("rejected");
  if (chosen == record.end() || rejected == record.end()) {
    throw SchemaError("missing chosen/rejected");
  }
  pair.chosen = ConversationFromJson(*chosen, pair.id + "/chosen");
  pair.rejected = ConversationFromJson(*rejected, pair.id + "/rejected");
  if (auto it = record.find("category"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("category must be a string");
    pair.category = it->get<std::string>();
  }
  return pair;
}

std::vector<JsonlError> ForEachJsonlRecord(
    const std::filesystem::path& path,
    const std::function<void(const Json&)>& on_record) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<JsonlError> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      on_record(Json::parse(line));
    } catch (const Json::exception& e) {
      errors.push_back({line_no, e.what()});
    } catch (const SchemaError& e) {
      errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return errors;
}

JsonlReadResult<PreferencePair> ReadPairsJsonl(
    const std::filesystem::path& path) {
  JsonlReadResult<PreferencePair> result;
  result.errors = ForEachJsonlRecord(path, [&](const Json& j) {
    result.records.push_back(PairFromJson(j));
  });
  return result;
}

void WriteJsonl(const std::filesystem::path& path, std::span<const Json> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Json& row : rows) out << row.dump() << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

void WritePairsJsonl(const std::filesystem::path& path,
                     std::span<const PreferencePair> pairs) {
  std::vector<Json> rows;
  rows.reserve(pairs.size());
  for (const PreferencePair& p : pairs) rows.push_back(PairToJson(p));
  WriteJsonl(path, rows);
}

void WriteJsonFile(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace mtpref
