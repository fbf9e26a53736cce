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

#include "text_util.h"

#include <algorithm>
#include <array>
#include <cctype>

namespace mtpref::internal {

std::string_view Trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> Words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char ch : text) {
    if (std::isalnum(ch) != 0) {
      current.push_back(static_cast<char>(std::tolower(ch)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<std::string> ContentWords(std::string_view text) {
  static constexpr std::array<std::string_view, 32> kStopwords = {
      "about", "after", "again", "also",  "been",  "being", "could", "does",
      "from",  "have",  "into",  "just",  "more",  "most",  "much",  "only",
      "other", "over",  "should", "some", "such",  "than",  "that",  "their",
      "them",  "then",  "there", "these", "they",  "this",  "what",  "with"};
  std::vector<std::string> out;
  for (std::string& w : Words(text)) {
    if (w.size() < 4) continue;
    if (std::find(kStopwords.begin(), kStopwords.end(), w) !=
        kStopwords.end()) {
      continue;
    }
    out.push_back(std::move(w));
  }
  return out;
}

bool Contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::size_t FindLast(std::string_view haystack, std::string_view needle) {
  return haystack.rfind(needle);
}

std::uint64_t Fnv1a64(std::string_view text, std::uint64_t seed) {
  std::uint64_t hash = 14695981039346656037ULL ^ seed;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace mtpref::internal
