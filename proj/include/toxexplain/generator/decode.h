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

#ifndef TOXEXPLAIN_GENERATOR_DECODE_H_
#define TOXEXPLAIN_GENERATOR_DECODE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/generator/model.h"

namespace toxexplain::generator {

struct DecodeParams {
  int beams = 10;
  double length_penalty = 5.0;
  int max_length = 64;  // generated tokens, <eos> included

  void Validate() const;
  Json ToJson() const;
  static DecodeParams FromJson(const Json &json);
};

// Argmax at every step; ties go to the lower token id.
std::vector<int> GreedyDecode(const Seq2SeqModel &model,
                              const EncodedExample &example, int max_length);

// Beam search that stops as soon as `beams` hypotheses have ended, scoring
// finished hypotheses by sum log-probability / length^length_penalty where
// length counts the generated tokens including <eos>. With one beam this
// reduces to greedy decoding.
std::vector<int> BeamSearch(const Seq2SeqModel &model,
                            const EncodedExample &example,
                            const DecodeParams &params);

struct GenerationRequest {
  std::string post_id;
  ModelInput input;
};

struct GeneratedExplanation {
  std::string post_id;
  std::string input;
  std::string text;
  std::string config_hash;
  uint64_t seed = 0;

  Json ToJson() const;
  static GeneratedExplanation FromJson(const Json &json);
};

std::vector<GeneratedExplanation> Generate(
    const Seq2SeqModel &model, const std::vector<GenerationRequest> &requests,
    const DecodeParams &params, const std::string &config_hash, uint64_t seed);

}  // namespace toxexplain::generator

#endif  // TOXEXPLAIN_GENERATOR_DECODE_H_
