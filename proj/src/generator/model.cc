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

#include "toxexplain/generator/model.h"

#include <numeric>

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::generator {
namespace {

constexpr char kFormat[] = "toxexplain-seq2seq-1";

std::vector<int> Positions(size_t n) {
  std::vector<int> pos(n);
  std::iota(pos.begin(), pos.end(), 0);
  return pos;
}

std::string ShapeOf(const nn::Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

FusionKind FusionFor(Infusion infusion) {
  switch (infusion) {
    case Infusion::kC3: return FusionKind::kProbabilities;
    case Infusion::kC4: return FusionKind::kEncodedTokens;
    case Infusion::kC5: return FusionKind::kCoda;
    default: return FusionKind::kText;
  }
}

std::vector<std::string> GeneratorSpecialTokens() {
  std::vector<std::string> specials = {std::string(kSeparatorToken)};
  for (const std::string &t : attributes::AllTokens()) specials.push_back(t);
  return specials;
}

void ModelConfig::Validate() const {
  if (dim <= 0 || heads <= 0 || dim % heads != 0) {
    throw PreconditionError("model dim " + std::to_string(dim) +
                            " must be a positive multiple of heads " +
                            std::to_string(heads));
  }
  if (ffn <= 0 || encoder_layers < 1 || decoder_layers < 1) {
    throw PreconditionError("model needs ffn > 0 and at least one encoder "
                            "and decoder layer");
  }
  if (max_source_tokens < 2 || max_source_tokens > max_positions) {
    throw PreconditionError("max_source_tokens must lie in [2, max_positions]");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw PreconditionError("dropout must lie in [0, 1)");
  }
}

Json ModelConfig::ToJson() const {
  return {{"dim", dim},
          {"heads", heads},
          {"ffn", ffn},
          {"encoder_layers", encoder_layers},
          {"decoder_layers", decoder_layers},
          {"max_positions", max_positions},
          {"max_source_tokens", max_source_tokens},
          {"dropout", dropout},
          {"coda_alpha", coda_alpha},
          {"coda_affinity", "negative_l1"},
          {"infusion", InfusionName(infusion)},
          {"seed", seed}};
}

ModelConfig ModelConfig::FromJson(const Json &json) {
  ModelConfig c;
  c.dim = json.value("dim", c.dim);
  c.heads = json.value("heads", c.heads);
  c.ffn = json.value("ffn", c.ffn);
  c.encoder_layers = json.value("encoder_layers", c.encoder_layers);
  c.decoder_layers = json.value("decoder_layers", c.decoder_layers);
  c.max_positions = json.value("max_positions", c.max_positions);
  c.max_source_tokens = json.value("max_source_tokens", c.max_source_tokens);
  c.dropout = json.value("dropout", c.dropout);
  c.coda_alpha = json.value("coda_alpha", c.coda_alpha);
  c.seed = json.value("seed", c.seed);
  std::string infusion = json.value("infusion", std::string("none"));
  auto parsed = ParseInfusion(infusion);
  if (!parsed) throw PreconditionError("unknown infusion '" + infusion + "'");
  c.infusion = *parsed;
  c.Validate();
  return c;
}

Seq2SeqModel::Seq2SeqModel(nn::Vocabulary vocab, ModelConfig config)
    : config_(std::move(config)),
      fusion_(FusionFor(config_.infusion)),
      vocab_(std::move(vocab)) {
  config_.Validate();
  std::mt19937_64 rng(config_.seed);
  const int d = config_.dim;
  embedding_ = store_.Create(
      "embed", nn::NormalInit(static_cast<int>(vocab_.size()), d, nn::kInitStd, rng));
  encoder_positions_ = store_.Create(
      "encoder.positions", nn::NormalInit(config_.max_positions, d, nn::kInitStd, rng));
  decoder_positions_ = store_.Create(
      "decoder.positions", nn::NormalInit(config_.max_positions, d, nn::kInitStd, rng));
  encoder_embed_norm_ = nn::LayerNormLayer(store_, "encoder.embed_norm", d);
  decoder_embed_norm_ = nn::LayerNormLayer(store_, "decoder.embed_norm", d);
  for (int i = 0; i < config_.encoder_layers; ++i) {
    encoder_.emplace_back(store_, "encoder." + std::to_string(i), d,
                          config_.heads, config_.ffn, rng);
  }
  for (int i = 0; i < config_.decoder_layers; ++i) {
    decoder_.emplace_back(store_, "decoder." + std::to_string(i), d,
                          config_.heads, config_.ffn, rng);
  }
  switch (fusion_) {
    case FusionKind::kProbabilities:
      lift_ = nn::Linear(store_, "fusion.lift", 6, d, rng);
      merge_ = nn::Linear(store_, "fusion.merge", 2 * d, d, rng);
      break;
    case FusionKind::kEncodedTokens:
      merge_ = nn::Linear(store_, "fusion.merge", 2 * d, d, rng);
      break;
    case FusionKind::kCoda:
      coda_q_ = nn::Linear(store_, "fusion.coda.q", d, d, rng);
      coda_k_ = nn::Linear(store_, "fusion.coda.k", d, d, rng);
      coda_v_ = nn::Linear(store_, "fusion.coda.v", d, d, rng);
      break;
    case FusionKind::kText:
      break;
  }
}

std::vector<int> Seq2SeqModel::EncodeText(const std::string &text,
                                          bool *truncated) const {
  std::vector<int> ids = vocab_.Encode(text);
  const size_t limit = static_cast<size_t>(config_.max_source_tokens) - 1;
  if (ids.size() > limit) {
    spdlog::warn("generator input of {} tokens truncated to {}", ids.size(), limit);
    ids.resize(limit);
    ++truncations_;
    if (truncated) *truncated = true;
  }
  ids.push_back(nn::Vocabulary::kEos);
  return ids;
}

EncodedExample Seq2SeqModel::Encode(const ModelInput &input,
                                    const std::string *target) const {
  EncodedExample ex;
  ex.source = EncodeText(input.source, &ex.truncated);
  if (fusion_ == FusionKind::kEncodedTokens || fusion_ == FusionKind::kCoda) {
    ex.attributes = EncodeText(input.attributes, &ex.truncated);
  }
  ex.probabilities = input.probabilities;
  if (target) {
    ex.target = vocab_.Encode(*target);
    const size_t limit = static_cast<size_t>(config_.max_positions) - 1;
    if (ex.target.size() > limit) ex.target.resize(limit);
  }
  return ex;
}

nn::Var Seq2SeqModel::EncodeRows(nn::Graph &g, nn::Var rows,
                                 const nn::PassOptions &opts) const {
  const auto n = g.value(rows).rows();
  if (n > config_.max_positions) {
    throw PreconditionError("encoder input of " + std::to_string(n) +
                            " rows exceeds max_positions");
  }
  nn::Var x = g.Add(rows, g.Gather(g.Param(encoder_positions_), Positions(n)));
  x = opts.MaybeDropout(g, encoder_embed_norm_.Forward(g, x));
  for (const nn::EncoderLayer &layer : encoder_) x = layer.Forward(g, x, opts);
  return x;
}

nn::Var Seq2SeqModel::EncodeIds(nn::Graph &g, std::span<const int> ids,
                                const nn::PassOptions &opts) const {
  return EncodeRows(g, g.Gather(g.Param(embedding_), ids), opts);
}

nn::Var Seq2SeqModel::LiftProbabilities(
    nn::Graph &g, const attributes::ToxicityProbabilities &p) const {
  if (!lift_.weight()) {
    throw PreconditionError("model was not built for probability fusion");
  }
  nn::Matrix row(1, 6);
  for (int j = 0; j < 6; ++j) row(0, j) = p[j];
  return lift_.Forward(g, g.Constant(std::move(row)));
}

nn::Var Seq2SeqModel::FuseConcat(nn::Graph &g, nn::Var h_utter,
                                 nn::Var h_toxic) const {
  const nn::Matrix &u = g.value(h_utter);
  const nn::Matrix &t = g.value(h_toxic);
  if (u.cols() != config_.dim || t.cols() != config_.dim) {
    throw ShapeError("fusion: utterance encoding " + ShapeOf(u) +
                     " and attribute encoding " + ShapeOf(t) +
                     " must both have width " + std::to_string(config_.dim));
  }
  if (!merge_.weight()) {
    throw PreconditionError("model was not built for concatenation fusion");
  }
  nn::Var toxic = g.RepeatRows(g.MeanRows(h_toxic), static_cast<int>(u.rows()));
  return merge_.Forward(g, g.ConcatCols({h_utter, toxic}));
}

nn::Var Seq2SeqModel::FuseCoda(nn::Graph &g, nn::Var h_toxic,
                               nn::Var h_utter) const {
  const nn::Matrix &u = g.value(h_utter);
  const nn::Matrix &t = g.value(h_toxic);
  if (u.cols() != t.cols()) {
    throw ShapeError("de-attention fusion: utterance encoding " + ShapeOf(u) +
                     " and attribute encoding " + ShapeOf(t) +
                     " differ in width");
  }
  if (!coda_q_.weight()) {
    throw PreconditionError("model was not built for de-attention fusion");
  }
  nn::Var psi = CodaAttention(g, coda_q_.Forward(g, h_utter),
                              coda_k_.Forward(g, h_toxic),
                              coda_v_.Forward(g, h_toxic),
                              NegativeL1Affinity(config_.coda_alpha));
  return g.Add(h_utter, psi);
}

nn::Var Seq2SeqModel::Memory(nn::Graph &g, const EncodedExample &example,
                             const nn::PassOptions &opts) const {
  nn::Var h_utter = EncodeIds(g, example.source, opts);
  switch (fusion_) {
    case FusionKind::kText:
      return h_utter;
    case FusionKind::kProbabilities: {
      nn::Var h_toxic = EncodeRows(g, LiftProbabilities(g, example.probabilities), opts);
      return FuseConcat(g, h_utter, h_toxic);
    }
    case FusionKind::kEncodedTokens:
      return FuseConcat(g, h_utter, EncodeIds(g, example.attributes, opts));
    case FusionKind::kCoda:
      return FuseCoda(g, EncodeIds(g, example.attributes, opts), h_utter);
  }
  return h_utter;
}

nn::Var Seq2SeqModel::DecoderLogits(nn::Graph &g, nn::Var memory,
                                    std::span<const int> decoder_input,
                                    const nn::PassOptions &opts) const {
  const size_t n = decoder_input.size();
  if (n > static_cast<size_t>(config_.max_positions)) {
    throw PreconditionError("decoder input exceeds max_positions");
  }
  nn::Var table = g.Param(embedding_);
  nn::Var x = g.Add(g.Gather(table, decoder_input),
                    g.Gather(g.Param(decoder_positions_), Positions(n)));
  x = opts.MaybeDropout(g, decoder_embed_norm_.Forward(g, x));
  nn::Matrix mask = nn::CausalMask(static_cast<int>(n));
  for (const nn::DecoderLayer &layer : decoder_) {
    x = layer.Forward(g, x, memory, mask, opts);
  }
  return g.MatMulT(x, table);
}

nn::Var Seq2SeqModel::Loss(nn::Graph &g, const EncodedExample &example,
                           const nn::PassOptions &opts) const {
  std::vector<int> input = {nn::Vocabulary::kBos};
  input.insert(input.end(), example.target.begin(), example.target.end());
  std::vector<int> output = example.target;
  output.push_back(nn::Vocabulary::kEos);
  nn::Var memory = Memory(g, example, opts);
  return g.CrossEntropy(DecoderLogits(g, memory, input, opts), output);
}

void Seq2SeqModel::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  vocab_.Save(dir / "vocab.txt");
  store_.Save(dir / "weights.bin");
  WriteJsonAtomic(dir / "config.json",
                  {{"format", kFormat},
                   {"model", config_.ToJson()},
                   {"vocab_size", vocab_.size()},
                   {"parameters", store_.ScalarCount()}});
}

std::unique_ptr<Seq2SeqModel> Seq2SeqModel::Load(const std::filesystem::path &dir) {
  Json meta = ReadJson(dir / "config.json");
  if (meta.value("format", "") != kFormat) {
    throw LoadError((dir / "config.json").string() +
                    ": not a generator checkpoint");
  }
  auto model = std::make_unique<Seq2SeqModel>(nn::Vocabulary::Load(dir / "vocab.txt"),
                                              ModelConfig::FromJson(meta.at("model")));
  model->store_.Load(dir / "weights.bin");
  return model;
}

}  // namespace toxexplain::generator
