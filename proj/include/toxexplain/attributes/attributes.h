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

#ifndef TOXEXPLAIN_ATTRIBUTES_ATTRIBUTES_H_
#define TOXEXPLAIN_ATTRIBUTES_ATTRIBUTES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/corpus/dataset.h"

namespace toxexplain::attributes {

inline constexpr size_t kNumLabels = 6;

// Label order used everywhere a probability vector or token string appears.
enum class ToxicityLabel {
  kToxicity,
  kSevereToxicity,
  kObscene,
  kThreat,
  kInsult,
  kIdentityAttack,
};

using ToxicityProbabilities = std::array<double, kNumLabels>;

const std::array<ToxicityLabel, kNumLabels> &LabelOrder();
std::string LabelName(ToxicityLabel label);
// Accepts "severe_toxicity", "severe toxicity", "severe-toxicity".
std::optional<ToxicityLabel> ParseLabel(const std::string &name);
std::string PositiveToken(ToxicityLabel label);
std::string NegativeToken(ToxicityLabel label);
// All twelve tokens, positive then negative per label.
std::vector<std::string> AllTokens();

enum class Rendering { kSpecialTokens, kPlainPrompt };

struct AttributeConfig {
  double lambda = 0.5;
  Rendering rendering = Rendering::kSpecialTokens;

  // Throws PreconditionError unless 0 < lambda < 1.
  void Validate() const;
  Json ToJson() const;
  static AttributeConfig FromJson(const Json &json);
};

enum class AttributeKind { kToxicityTokens, kToxicityPrompt, kInDataset };

struct AttributeString {
  std::string text;
  AttributeKind kind = AttributeKind::kToxicityTokens;
};

// Token <-> plain phrase table used by the prompt rendering.
class PromptTable {
 public:
  struct Entry {
    std::string token;
    std::string prompt;
  };

  static const PromptTable &Default();
  // TSV with header "token\tprompt" after optional "#" comment lines; must
  // cover all twelve tokens once.
  static PromptTable Load(const std::filesystem::path &path);
  static PromptTable Parse(const std::string &content,
                           const std::string &origin = "");

  const std::string &PromptFor(const std::string &token) const;
  const std::string &TokenFor(const std::string &prompt) const;
  const std::vector<Entry> &entries() const { return entries_; }

 private:
  explicit PromptTable(std::vector<Entry> entries);
  std::vector<Entry> entries_;
};

// Per label: p < lambda gives the NOT token, otherwise the positive token.
std::vector<std::string> ThresholdTokens(const ToxicityProbabilities &p,
                                         double lambda);

AttributeString ThresholdedTokens(const ToxicityProbabilities &p,
                                  const AttributeConfig &config,
                                  const PromptTable &table = PromptTable::Default());

// Converts between the two renderings of the same six decisions.
AttributeString TokensToPrompt(const AttributeString &tokens,
                               const PromptTable &table = PromptTable::Default());
AttributeString PromptToTokens(const AttributeString &prompt,
                               const PromptTable &table = PromptTable::Default());

// Flags first (intentional, lewd, offensive, group-targeting, in-group), then
// the implicit class, then the target group.
AttributeString InDatasetString(const corpus::InDatasetAttributes &attributes);

enum class PerturbMode { kAllZeros, kAllOnes, kRandom };

std::optional<PerturbMode> ParsePerturbMode(const std::string &name);
std::string PerturbModeName(PerturbMode mode);

// kRandom requires a seed.
ToxicityProbabilities PerturbProbabilities(PerturbMode mode,
                                           std::optional<uint64_t> seed);

// Swaps the token for `label` with its negation.
AttributeString FlipAttribute(const AttributeString &s, ToxicityLabel label);

size_t CountPositiveTokens(const AttributeString &s);

}  // namespace toxexplain::attributes

#endif  // TOXEXPLAIN_ATTRIBUTES_ATTRIBUTES_H_
