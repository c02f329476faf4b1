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

#ifndef TOXEXPLAIN_GENERATOR_MODEL_H_
#define TOXEXPLAIN_GENERATOR_MODEL_H_

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "toxexplain/attributes/attributes.h"
#include "toxexplain/common/io.h"
#include "toxexplain/generator/coda.h"
#include "toxexplain/generator/inputs.h"
#include "toxexplain/nn/layers.h"
#include "toxexplain/nn/parameters.h"
#include "toxexplain/nn/vocab.h"

namespace toxexplain::generator {

// How attributes reach the decoder.
enum class FusionKind {
  kText,            // already concatenated into the source text
  kProbabilities,   // probability vector lifted and encoded, then merged
  kEncodedTokens,   // attribute tokens encoded separately, then merged
  kCoda,            // attribute encoding added through de-attention
};

FusionKind FusionFor(Infusion infusion);

struct ModelConfig {
  int dim = 768;
  int heads = 12;
  int ffn = 3072;
  int encoder_layers = 6;
  int decoder_layers = 6;
  int max_positions = 1024;
  int max_source_tokens = 512;   // longer sources are truncated with a warning
  double dropout = 0.1;
  double coda_alpha = 1.0;       // scale of the L1 affinity in de-attention
  Infusion infusion = Infusion::kNone;
  uint64_t seed = 1;             // initialization

  void Validate() const;
  Json ToJson() const;
  static ModelConfig FromJson(const Json &json);
};

// What the model consumes for one post. For text infusions `source` is the
// fully built input; otherwise it is the post and the attribute fields carry
// the signal.
struct ModelInput {
  std::string source;
  std::string attributes;  // token or prompt string for C4/C5
  attributes::ToxicityProbabilities probabilities{};  // for C3
};

struct EncodedExample {
  std::vector<int> source;      // ends with <eos>
  std::vector<int> attributes;  // ends with <eos>; empty unless needed
  attributes::ToxicityProbabilities probabilities{};
  std::vector<int> target;      // without <bos>/<eos>
  bool truncated = false;
};

// Encoder-decoder with shared token embeddings and a tied output layer.
class Seq2SeqModel {
 public:
  Seq2SeqModel(nn::Vocabulary vocab, ModelConfig config);
  Seq2SeqModel(const Seq2SeqModel &) = delete;
  Seq2SeqModel &operator=(const Seq2SeqModel &) = delete;

  EncodedExample Encode(const ModelInput &input,
                        const std::string *target = nullptr) const;

  // Encoder output after fusion, the memory the decoder attends to.
  nn::Var Memory(nn::Graph &g, const EncodedExample &example,
                 const nn::PassOptions &opts) const;
  // Logits (len x vocab) for each position of `decoder_input`.
  nn::Var DecoderLogits(nn::Graph &g, nn::Var memory,
                        std::span<const int> decoder_input,
                        const nn::PassOptions &opts) const;
  // Mean token cross-entropy of the target given the input.
  nn::Var Loss(nn::Graph &g, const EncodedExample &example,
               const nn::PassOptions &opts) const;

  // Building blocks, exposed for inspection.
  nn::Var EncodeIds(nn::Graph &g, std::span<const int> ids,
                    const nn::PassOptions &opts) const;
  nn::Var EncodeRows(nn::Graph &g, nn::Var rows, const nn::PassOptions &opts) const;
  // 1 x 6 probabilities -> 1 x dim.
  nn::Var LiftProbabilities(nn::Graph &g,
                            const attributes::ToxicityProbabilities &p) const;
  // [H_utter, mean(H_toxic) per row] projected from 2*dim back to dim.
  nn::Var FuseConcat(nn::Graph &g, nn::Var h_utter, nn::Var h_toxic) const;
  // H_utter + de-attention of H_utter over H_toxic.
  nn::Var FuseCoda(nn::Graph &g, nn::Var h_toxic, nn::Var h_utter) const;

  void Save(const std::filesystem::path &dir) const;
  static std::unique_ptr<Seq2SeqModel> Load(const std::filesystem::path &dir);

  const nn::Vocabulary &vocab() const { return vocab_; }
  const ModelConfig &config() const { return config_; }
  nn::ParameterStore &store() { return store_; }
  const nn::ParameterStore &store() const { return store_; }
  nn::Parameter *probability_lift_weight() const { return lift_.weight(); }
  nn::Parameter *probability_lift_bias() const { return lift_.bias(); }
  size_t truncation_count() const { return truncations_.load(); }

 private:
  std::vector<int> EncodeText(const std::string &text, bool *truncated) const;

  ModelConfig config_;
  FusionKind fusion_;
  nn::Vocabulary vocab_;
  nn::ParameterStore store_;
  nn::Parameter *embedding_ = nullptr;
  nn::Parameter *encoder_positions_ = nullptr;
  nn::Parameter *decoder_positions_ = nullptr;
  nn::LayerNormLayer encoder_embed_norm_;
  nn::LayerNormLayer decoder_embed_norm_;
  std::vector<nn::EncoderLayer> encoder_;
  std::vector<nn::DecoderLayer> decoder_;
  nn::Linear lift_;         // C3: 6 -> dim
  nn::Linear merge_;        // C3/C4: 2*dim -> dim
  nn::Linear coda_q_, coda_k_, coda_v_;  // C5
  mutable std::atomic<size_t> truncations_{0};
};

// Special tokens every generator vocabulary carries.
std::vector<std::string> GeneratorSpecialTokens();

}  // namespace toxexplain::generator

#endif  // TOXEXPLAIN_GENERATOR_MODEL_H_
