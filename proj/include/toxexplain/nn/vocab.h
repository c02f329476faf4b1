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

#ifndef TOXEXPLAIN_NN_VOCAB_H_
#define TOXEXPLAIN_NN_VOCAB_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace toxexplain::nn {

// Whitespace-token vocabulary. Ids 0-3 are always <pad>, <unk>, <bos>,
// <eos>; extra specials follow, then corpus tokens by descending count with
// ties broken lexicographically.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;

  Vocabulary();

  static Vocabulary Build(const std::vector<std::string> &texts,
                          const std::vector<std::string> &extra_specials = {},
                          size_t min_count = 1, size_t max_size = 0);

  // Returns the id of an existing token or appends it.
  int Add(const std::string &token, bool special = false);

  int Id(std::string_view token) const;  // kUnk when missing
  bool Contains(std::string_view token) const;
  const std::string &Token(int id) const;
  bool IsSpecial(int id) const { return id >= 0 && id < num_special_ && special_[id]; }
  size_t size() const { return tokens_.size(); }

  std::vector<int> Encode(std::string_view text) const;
  // Stops at <eos>; drops <pad>/<bos>/<eos>. Other specials are kept
  // unless skip_special is set.
  std::string Decode(std::span<const int> ids, bool skip_special = false) const;

  // One token per line; specials are prefixed with a tab.
  void Save(const std::filesystem::path &path) const;
  static Vocabulary Load(const std::filesystem::path &path);

 private:
  std::vector<std::string> tokens_;
  std::vector<bool> special_;
  int num_special_ = 0;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace toxexplain::nn

#endif  // TOXEXPLAIN_NN_VOCAB_H_
