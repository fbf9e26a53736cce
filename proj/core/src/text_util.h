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

// String helpers shared by the implementation files. Not installed.

#ifndef MTPREF_SRC_TEXT_UTIL_H_
#define MTPREF_SRC_TEXT_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtpref::internal {

std::string_view Trim(std::string_view s);

// Lowercased alphanumeric words; punctuation separates words.
std::vector<std::string> Words(std::string_view text);

// Words of length >= 4 that are not in a small stopword list.
std::vector<std::string> ContentWords(std::string_view text);

bool Contains(std::string_view haystack, std::string_view needle);

// Position of the last occurrence of `needle`, or npos.
std::size_t FindLast(std::string_view haystack, std::string_view needle);

std::uint64_t Fnv1a64(std::string_view text, std::uint64_t seed = 0);

}  // namespace mtpref::internal

#endif  // MTPREF_SRC_TEXT_UTIL_H_
