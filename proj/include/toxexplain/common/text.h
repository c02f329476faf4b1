// Copyright 2026 The ToxExplain Authors.
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

#ifndef TOXEXPLAIN_COMMON_TEXT_H_
#define TOXEXPLAIN_COMMON_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace toxexplain {

// Separator placed between a post and whatever is appended to it.
inline constexpr std::string_view kSeparatorToken = "[SEP]";

// Splits on runs of ASCII whitespace. Empty tokens are never produced.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> Split(std::string_view text, char delim);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

std::string Trim(std::string_view text);

// Lowercases ASCII letters only; bytes >= 0x80 pass through untouched so
// UTF-8 sequences stay valid.
std::string ToLowerAscii(std::string_view text);

// Collapses whitespace runs to one space and trims.
std::string NormalizeSpace(std::string_view text);

bool StartsWith(std::string_view text, std::string_view prefix);
bool EndsWith(std::string_view text, std::string_view suffix);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

// Fixed-width lowercase hex rendering.
std::string ToHex(uint64_t value);

// Mixes two 64-bit values (splitmix64 finalizer). Used to derive
// per-record seeds from a run seed.
uint64_t MixSeed(uint64_t a, uint64_t b);

}  // namespace toxexplain

#endif  // TOXEXPLAIN_COMMON_TEXT_H_
