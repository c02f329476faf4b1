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

#include "toxexplain/nn/vocab.h"

#include <algorithm>
#include <sstream>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"

namespace toxexplain::nn {

Vocabulary::Vocabulary() {
  for (const char *s : {"<pad>", "<unk>", "<bos>", "<eos>"}) Add(s, true);
}

int Vocabulary::Add(const std::string &token, bool special) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  if (token.empty() || token.find_first_of(" \t\n\r") != std::string::npos) {
    throw PreconditionError("vocabulary tokens must be non-empty and contain "
                            "no whitespace: '" + token + "'");
  }
  int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  special_.push_back(special);
  if (special) num_special_ = id + 1;
  ids_.emplace(token, id);
  return id;
}

Vocabulary Vocabulary::Build(const std::vector<std::string> &texts,
                             const std::vector<std::string> &extra_specials,
                             size_t min_count, size_t max_size) {
  Vocabulary vocab;
  for (const std::string &s : extra_specials) vocab.Add(s, true);
  std::unordered_map<std::string, size_t> counts;
  for (const std::string &text : texts) {
    for (std::string &tok : SplitWhitespace(text)) ++counts[std::move(tok)];
  }
  std::vector<std::pair<std::string, size_t>> ranked;
  for (auto &[tok, n] : counts) {
    if (n >= min_count && !vocab.Contains(tok)) ranked.emplace_back(tok, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (const auto &[tok, n] : ranked) {
    if (max_size && vocab.size() >= max_size) break;
    vocab.Add(tok);
  }
  return vocab;
}

int Vocabulary::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

const std::string &Vocabulary::Token(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size())) {
    throw PreconditionError("token id " + std::to_string(id) +
                            " out of range for vocabulary of size " +
                            std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

std::vector<int> Vocabulary::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (const std::string &tok : SplitWhitespace(text)) ids.push_back(Id(tok));
  return ids;
}

std::string Vocabulary::Decode(std::span<const int> ids, bool skip_special) const {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id == kEos) break;
    if (id == kPad || id == kBos) continue;
    if (skip_special && IsSpecial(id)) continue;
    out.push_back(Token(id));
  }
  return Join(out, " ");
}

void Vocabulary::Save(const std::filesystem::path &path) const {
  std::ostringstream out;
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (special_[i]) out << '\t';
    out << tokens_[i] << '\n';
  }
  WriteFileAtomic(path, out.str());
}

Vocabulary Vocabulary::Load(const std::filesystem::path &path) {
  std::string content = ReadFile(path);
  Vocabulary vocab;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    bool special = line[0] == '\t';
    std::string token = special ? line.substr(1) : line;
    int expected = static_cast<int>(line_no - 1);
    if (vocab.Add(token, special) != expected) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) +
                      ": vocabulary entry '" + token + "' out of order");
    }
  }
  return vocab;
}

}  // namespace toxexplain::nn
