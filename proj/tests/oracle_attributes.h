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

// Literal-table reference for attribute thresholding.

#ifndef TOXEXPLAIN_TESTS_ORACLE_ATTRIBUTES_H_
#define TOXEXPLAIN_TESTS_ORACLE_ATTRIBUTES_H_

#include <string>

#include "toxexplain/attributes/attributes.h"

namespace toxexplain::testing {

// Oracle: elementwise comparison against a literal token table.
inline std::string OracleTokens(const attributes::ToxicityProbabilities &p, double lambda) {
  static const char *pos[] = {"<TOXIC>",  "<SEVERE_TOXIC>", "<OBSCENE>",
                              "<THREAT>", "<INSULT>",       "<IDENTITY_ATTACK>"};
  static const char *neg[] = {"<NOT_TOXIC>",  "<NOT_SEVERE_TOXIC>",
                              "<NOT_OBSCENE>", "<NOT_THREAT>",
                              "<NOT_INSULT>",  "<NOT_IDENTITY_ATTACK>"};
  std::string out;
  for (size_t i = 0; i < 6; ++i) {
    if (i) out += ' ';
    out += (p[i] < lambda) ? neg[i] : pos[i];
  }
  return out;
}

}  // namespace toxexplain::testing

#endif  // TOXEXPLAIN_TESTS_ORACLE_ATTRIBUTES_H_
