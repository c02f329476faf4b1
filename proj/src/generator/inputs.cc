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

#include "toxexplain/generator/inputs.h"

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::generator {
namespace {

std::string Attach(const std::string &post, const std::string &suffix,
                   bool post_first) {
  if (suffix.empty()) return post;
  const std::string sep = " " + std::string(kSeparatorToken) + " ";
  return post_first ? post + sep + suffix : suffix + sep + post;
}

}  // namespace

std::string InfusionName(Infusion infusion) {
  switch (infusion) {
    case Infusion::kNone: return "none";
    case Infusion::kC1: return "c1";
    case Infusion::kC2: return "c2";
    case Infusion::kC3: return "c3";
    case Infusion::kC4: return "c4";
    case Infusion::kC5: return "c5";
    case Infusion::kKg: return "kg";
  }
  return "?";
}

std::optional<Infusion> ParseInfusion(const std::string &name) {
  std::string n = ToLowerAscii(Trim(name));
  for (Infusion i : {Infusion::kNone, Infusion::kC1, Infusion::kC2,
                     Infusion::kC3, Infusion::kC4, Infusion::kC5,
                     Infusion::kKg}) {
    if (n == InfusionName(i)) return i;
  }
  return std::nullopt;
}

std::string BuildInputC1(const std::string &post,
                         const attributes::AttributeString &tokens,
                         bool post_first) {
  if (tokens.kind == attributes::AttributeKind::kInDataset) {
    throw PreconditionError("C1 input needs toxicity tokens or prompts");
  }
  return Attach(post, Trim(tokens.text), post_first);
}

std::string BuildInputC2(const std::string &post,
                         const attributes::AttributeString &attributes,
                         bool post_first) {
  if (attributes.kind != attributes::AttributeKind::kInDataset) {
    throw PreconditionError("C2 input needs in-dataset attributes");
  }
  return Attach(post, Trim(attributes.text), post_first);
}

std::string RecoverPost(const std::string &input, bool post_first) {
  const std::string sep = " " + std::string(kSeparatorToken) + " ";
  if (post_first) {
    size_t at = input.find(sep);
    return at == std::string::npos ? input : input.substr(0, at);
  }
  size_t at = input.rfind(sep);
  return at == std::string::npos ? input : input.substr(at + sep.size());
}

}  // namespace toxexplain::generator
