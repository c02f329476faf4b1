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

#ifndef TOXEXPLAIN_GENERATOR_INPUTS_H_
#define TOXEXPLAIN_GENERATOR_INPUTS_H_

#include <optional>
#include <string>

#include "toxexplain/attributes/attributes.h"

namespace toxexplain::generator {

enum class Infusion { kNone, kC1, kC2, kC3, kC4, kC5, kKg };

std::string InfusionName(Infusion infusion);
std::optional<Infusion> ParseInfusion(const std::string &name);

// "post [SEP] attributes". With post_first unset the attributes lead.
// An empty attribute string leaves the post unchanged.
std::string BuildInputC1(const std::string &post,
                         const attributes::AttributeString &tokens,
                         bool post_first = true);
std::string BuildInputC2(const std::string &post,
                         const attributes::AttributeString &attributes,
                         bool post_first = true);

// Inverse of the builders above. Preprocessed posts are lowercase, so the
// uppercase separator cannot occur inside them.
std::string RecoverPost(const std::string &input, bool post_first = true);

}  // namespace toxexplain::generator

#endif  // TOXEXPLAIN_GENERATOR_INPUTS_H_
