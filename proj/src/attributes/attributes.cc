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

#include "toxexplain/attributes/attributes.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::attributes {
namespace {

struct LabelInfo {
  const char *name;
  const char *token_stem;
};

constexpr std::array<LabelInfo, kNumLabels> kLabels = {{
    {"toxicity", "TOXIC"},
    {"severe_toxicity", "SEVERE_TOXIC"},
    {"obscene", "OBSCENE"},
    {"threat", "THREAT"},
    {"insult", "INSULT"},
    {"identity_attack", "IDENTITY_ATTACK"},
}};

const LabelInfo &Info(ToxicityLabel label) {
  return kLabels[static_cast<size_t>(label)];
}

std::string KindName(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kToxicityTokens: return "toxicity_tokens";
    case AttributeKind::kToxicityPrompt: return "toxicity_prompt";
    case AttributeKind::kInDataset: return "in_dataset";
  }
  return "?";
}

}  // namespace

const std::array<ToxicityLabel, kNumLabels> &LabelOrder() {
  static const std::array<ToxicityLabel, kNumLabels> order = {
      ToxicityLabel::kToxicity, ToxicityLabel::kSevereToxicity,
      ToxicityLabel::kObscene,  ToxicityLabel::kThreat,
      ToxicityLabel::kInsult,   ToxicityLabel::kIdentityAttack};
  return order;
}

std::string LabelName(ToxicityLabel label) { return Info(label).name; }

std::optional<ToxicityLabel> ParseLabel(const std::string &name) {
  std::string n = ToLowerAscii(Trim(name));
  std::replace(n.begin(), n.end(), ' ', '_');
  std::replace(n.begin(), n.end(), '-', '_');
  for (ToxicityLabel label : LabelOrder()) {
    if (n == Info(label).name) return label;
  }
  if (n == "severe") return ToxicityLabel::kSevereToxicity;
  if (n == "toxic") return ToxicityLabel::kToxicity;
  return std::nullopt;
}

std::string PositiveToken(ToxicityLabel label) {
  return std::string("<") + Info(label).token_stem + ">";
}

std::string NegativeToken(ToxicityLabel label) {
  return std::string("<NOT_") + Info(label).token_stem + ">";
}

std::vector<std::string> AllTokens() {
  std::vector<std::string> out;
  for (ToxicityLabel label : LabelOrder()) {
    out.push_back(PositiveToken(label));
    out.push_back(NegativeToken(label));
  }
  return out;
}

void AttributeConfig::Validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw PreconditionError("attribute threshold must lie in (0, 1), got " +
                            std::to_string(lambda));
  }
}

Json AttributeConfig::ToJson() const {
  Json order = Json::array();
  for (ToxicityLabel label : LabelOrder()) order.push_back(LabelName(label));
  return {{"lambda", lambda},
          {"rendering", rendering == Rendering::kSpecialTokens
                            ? "special_tokens"
                            : "plain_prompt"},
          {"label_order", order}};
}

AttributeConfig AttributeConfig::FromJson(const Json &json) {
  AttributeConfig config;
  config.lambda = json.value("lambda", config.lambda);
  std::string rendering = json.value("rendering", std::string("special_tokens"));
  if (rendering == "special_tokens") {
    config.rendering = Rendering::kSpecialTokens;
  } else if (rendering == "plain_prompt") {
    config.rendering = Rendering::kPlainPrompt;
  } else {
    throw PreconditionError("unknown attribute rendering '" + rendering + "'");
  }
  config.Validate();
  return config;
}

PromptTable::PromptTable(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> tokens, prompts;
  for (const Entry &e : entries_) {
    if (!tokens.insert(e.token).second) {
      throw LoadError("prompt table repeats token " + e.token);
    }
    if (!prompts.insert(e.prompt).second) {
      throw LoadError("prompt table repeats prompt '" + e.prompt + "'");
    }
  }
  for (const std::string &token : AllTokens()) {
    if (!tokens.count(token)) {
      throw LoadError("prompt table is missing token " + token);
    }
  }
  if (entries_.size() != 2 * kNumLabels) {
    throw LoadError("prompt table must have 12 entries, got " +
                    std::to_string(entries_.size()));
  }
}

const PromptTable &PromptTable::Default() {
  static const PromptTable table({
      {"<TOXIC>", "toxic"},
      {"<NOT_TOXIC>", "not toxic"},
      {"<SEVERE_TOXIC>", "severely toxic"},
      {"<NOT_SEVERE_TOXIC>", "not severely toxic"},
      {"<OBSCENE>", "obscene"},
      {"<NOT_OBSCENE>", "not obscene"},
      {"<IDENTITY_ATTACK>", "identity attack"},
      {"<NOT_IDENTITY_ATTACK>", "no identity attack"},
      {"<INSULT>", "insulting"},
      {"<NOT_INSULT>", "not insulting"},
      {"<THREAT>", "threatful"},
      {"<NOT_THREAT>", "not threatful"},
  });
  return table;
}

PromptTable PromptTable::Load(const std::filesystem::path &path) {
  return Parse(ReadFile(path), path.string());
}

PromptTable PromptTable::Parse(const std::string &content,
                               const std::string &origin) {
  // Lines starting with '#' are comments.
  std::string body;
  std::istringstream lines(content);
  for (std::string line; std::getline(lines, line);) {
    if (!StartsWith(Trim(line), "#")) body += line + "\n";
  }
  DelimitedTable t = ParseDelimited(body, '\t');
  int token_col = t.Column("token");
  int prompt_col = t.Column("prompt");
  if (token_col < 0 || prompt_col < 0) {
    throw LoadError(origin + ": prompt table needs 'token' and 'prompt' columns");
  }
  std::vector<Entry> entries;
  for (const auto &row : t.rows) {
    entries.push_back({Trim(row.at(token_col)), Trim(row.at(prompt_col))});
  }
  return PromptTable(std::move(entries));
}

const std::string &PromptTable::PromptFor(const std::string &token) const {
  for (const Entry &e : entries_) {
    if (e.token == token) return e.prompt;
  }
  throw PreconditionError("no prompt for token " + token);
}

const std::string &PromptTable::TokenFor(const std::string &prompt) const {
  for (const Entry &e : entries_) {
    if (e.prompt == prompt) return e.token;
  }
  throw PreconditionError("no token for prompt '" + prompt + "'");
}

std::vector<std::string> ThresholdTokens(const ToxicityProbabilities &p,
                                         double lambda) {
  std::vector<std::string> tokens;
  tokens.reserve(kNumLabels);
  for (size_t i = 0; i < kNumLabels; ++i) {
    ToxicityLabel label = LabelOrder()[i];
    tokens.push_back(p[i] < lambda ? NegativeToken(label) : PositiveToken(label));
  }
  return tokens;
}

AttributeString ThresholdedTokens(const ToxicityProbabilities &p,
                                  const AttributeConfig &config,
                                  const PromptTable &table) {
  config.Validate();
  AttributeString tokens{Join(ThresholdTokens(p, config.lambda), " "),
                         AttributeKind::kToxicityTokens};
  if (config.rendering == Rendering::kPlainPrompt) {
    return TokensToPrompt(tokens, table);
  }
  return tokens;
}

AttributeString TokensToPrompt(const AttributeString &tokens,
                               const PromptTable &table) {
  if (tokens.kind != AttributeKind::kToxicityTokens) {
    throw PreconditionError("expected toxicity tokens, got " +
                            KindName(tokens.kind));
  }
  std::vector<std::string> phrases;
  for (const std::string &token : SplitWhitespace(tokens.text)) {
    phrases.push_back(table.PromptFor(token));
  }
  return {Join(phrases, " "), AttributeKind::kToxicityPrompt};
}

AttributeString PromptToTokens(const AttributeString &prompt,
                               const PromptTable &table) {
  if (prompt.kind != AttributeKind::kToxicityPrompt) {
    throw PreconditionError("expected a toxicity prompt, got " +
                            KindName(prompt.kind));
  }
  // Phrases are multi-word, so parse slot by slot: each label contributes
  // either its positive or its negative phrase, longest match first.
  std::vector<std::string> words = SplitWhitespace(prompt.text);
  std::vector<std::string> tokens;
  size_t pos = 0;
  for (ToxicityLabel label : LabelOrder()) {
    std::vector<std::string> candidates = {NegativeToken(label),
                                           PositiveToken(label)};
    std::sort(candidates.begin(), candidates.end(),
              [&](const std::string &a, const std::string &b) {
                return SplitWhitespace(table.PromptFor(a)).size() >
                       SplitWhitespace(table.PromptFor(b)).size();
              });
    bool matched = false;
    for (const std::string &token : candidates) {
      std::vector<std::string> phrase = SplitWhitespace(table.PromptFor(token));
      if (pos + phrase.size() <= words.size() &&
          std::equal(phrase.begin(), phrase.end(), words.begin() + pos)) {
        tokens.push_back(token);
        pos += phrase.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw PreconditionError("prompt '" + prompt.text + "' has no phrase for " +
                              LabelName(label));
    }
  }
  if (pos != words.size()) {
    throw PreconditionError("trailing words in prompt '" + prompt.text + "'");
  }
  return {Join(tokens, " "), AttributeKind::kToxicityTokens};
}

AttributeString InDatasetString(const corpus::InDatasetAttributes &attributes) {
  std::vector<std::string> parts;
  if (attributes.sbic_flags) {
    const corpus::SbicFlags &f = *attributes.sbic_flags;
    if (f.intentional) parts.push_back("intentional");
    if (f.lewd) parts.push_back("lewd");
    if (f.offensive) parts.push_back("offensive");
    if (f.group_targeting) parts.push_back("group-targeting");
    if (f.in_group) parts.push_back("in-group");
  }
  if (attributes.implicit_class) {
    parts.push_back(corpus::ImplicitClassName(*attributes.implicit_class));
  }
  std::string target = NormalizeSpace(attributes.target_group);
  if (!target.empty()) parts.push_back(target);
  return {Join(parts, " "), AttributeKind::kInDataset};
}

std::optional<PerturbMode> ParsePerturbMode(const std::string &name) {
  if (name == "all_zeros" || name == "zeros") return PerturbMode::kAllZeros;
  if (name == "all_ones" || name == "ones") return PerturbMode::kAllOnes;
  if (name == "random") return PerturbMode::kRandom;
  return std::nullopt;
}

std::string PerturbModeName(PerturbMode mode) {
  switch (mode) {
    case PerturbMode::kAllZeros: return "all_zeros";
    case PerturbMode::kAllOnes: return "all_ones";
    case PerturbMode::kRandom: return "random";
  }
  return "?";
}

ToxicityProbabilities PerturbProbabilities(PerturbMode mode,
                                           std::optional<uint64_t> seed) {
  ToxicityProbabilities p{};
  switch (mode) {
    case PerturbMode::kAllZeros:
      p.fill(0.0);
      break;
    case PerturbMode::kAllOnes:
      p.fill(1.0);
      break;
    case PerturbMode::kRandom: {
      if (!seed) {
        throw PreconditionError("random perturbation requires a seed");
      }
      std::mt19937_64 rng(*seed);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (double &v : p) v = uniform(rng);
      break;
    }
  }
  return p;
}

AttributeString FlipAttribute(const AttributeString &s, ToxicityLabel label) {
  if (s.kind != AttributeKind::kToxicityTokens) {
    throw PreconditionError("only toxicity token strings can be flipped, got " +
                            KindName(s.kind));
  }
  const std::string pos = PositiveToken(label);
  const std::string neg = NegativeToken(label);
  std::vector<std::string> tokens = SplitWhitespace(s.text);
  bool found = false;
  for (std::string &token : tokens) {
    if (token == pos) {
      token = neg;
      found = true;
    } else if (token == neg) {
      token = pos;
      found = true;
    }
  }
  if (!found) {
    throw PreconditionError("no " + LabelName(label) + " token in '" + s.text +
                            "'");
  }
  return {Join(tokens, " "), s.kind};
}

size_t CountPositiveTokens(const AttributeString &s) {
  AttributeString tokens =
      s.kind == AttributeKind::kToxicityPrompt ? PromptToTokens(s) : s;
  size_t count = 0;
  for (const std::string &token : SplitWhitespace(tokens.text)) {
    if (!StartsWith(token, "<NOT_")) ++count;
  }
  return count;
}

}  // namespace toxexplain::attributes
