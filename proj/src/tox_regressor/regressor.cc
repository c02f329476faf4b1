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

#include "toxexplain/tox_regressor/regressor.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/nn/optimizer.h"

namespace toxexplain::tox_regressor {
namespace {

constexpr char kFormat[] = "toxexplain-regressor-1";

Json LabelOrderJson() {
  Json order = Json::array();
  for (auto label : attributes::LabelOrder()) {
    order.push_back(attributes::LabelName(label));
  }
  return order;
}

nn::Matrix LabelMatrix(const std::vector<corpus::ToxicityRecord> &records,
                       const std::vector<size_t> &rows) {
  nn::Matrix m(rows.size(), 6);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = records[rows[i]].labels[j];
  }
  return m;
}

}  // namespace

Json RegressorConfig::ToJson() const {
  return {{"dim", dim},
          {"hidden", hidden},
          {"encoder_layers", encoder_layers},
          {"heads", heads},
          {"max_tokens", max_tokens},
          {"min_count", min_count},
          {"max_vocab", max_vocab},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"weight_decay", weight_decay},
          {"dropout", dropout},
          {"validation_fraction", validation_fraction},
          {"seed", seed}};
}

RegressorConfig RegressorConfig::FromJson(const Json &json) {
  RegressorConfig c;
  c.dim = json.value("dim", c.dim);
  c.hidden = json.value("hidden", c.hidden);
  c.encoder_layers = json.value("encoder_layers", c.encoder_layers);
  c.heads = json.value("heads", c.heads);
  c.max_tokens = json.value("max_tokens", c.max_tokens);
  c.min_count = json.value("min_count", c.min_count);
  c.max_vocab = json.value("max_vocab", c.max_vocab);
  c.epochs = json.value("epochs", c.epochs);
  c.batch_size = json.value("batch_size", c.batch_size);
  c.learning_rate = json.value("learning_rate", c.learning_rate);
  c.weight_decay = json.value("weight_decay", c.weight_decay);
  c.dropout = json.value("dropout", c.dropout);
  c.validation_fraction = json.value("validation_fraction", c.validation_fraction);
  c.seed = json.value("seed", c.seed);
  if (c.dim <= 0 || c.hidden <= 0 || c.max_tokens <= 0 || c.epochs <= 0 ||
      c.batch_size <= 0 || c.encoder_layers < 0) {
    throw PreconditionError("regressor config has a non-positive size: " +
                            c.ToJson().dump());
  }
  if (c.encoder_layers > 0 && c.dim % c.heads != 0) {
    throw PreconditionError("regressor dim must be divisible by heads");
  }
  return c;
}

std::string RegressorConfig::Hash() const {
  // nlohmann::json objects iterate in key order, so dump() is canonical.
  return ToHex(Fnv1a64(ToJson().dump()));
}

Json TrainingLog::ToJson() const {
  Json rows = Json::array();
  for (const EpochLog &e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"train_rmse", e.train_rmse},
                    {"validation_rmse", e.validation_rmse}});
  }
  return {{"epochs", rows},
          {"best_epoch", best_epoch},
          {"best_validation_rmse", best_validation_rmse},
          {"train_records", train_records},
          {"validation_records", validation_records}};
}

ToxicityRegressor::ToxicityRegressor(nn::Vocabulary vocab, RegressorConfig config)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  std::mt19937_64 rng(config_.seed);
  const int v = static_cast<int>(vocab_.size());
  embedding_ = store_.Create("embed", nn::NormalInit(v, config_.dim, 0.1, rng));
  if (config_.encoder_layers > 0) {
    positions_ = store_.Create(
        "positions", nn::NormalInit(config_.max_tokens, config_.dim, nn::kInitStd, rng));
    for (int i = 0; i < config_.encoder_layers; ++i) {
      layers_.emplace_back(store_, "encoder." + std::to_string(i), config_.dim,
                           config_.heads, 4 * config_.dim, rng);
    }
  }
  hidden_ = nn::Linear(store_, "hidden", config_.dim, config_.hidden, rng, true, 0.1);
  heads_ = nn::Linear(store_, "heads", config_.hidden, 6, rng, true, 0.1);
}

std::vector<int> ToxicityRegressor::Encode(const std::string &text,
                                           bool *truncated) const {
  std::vector<int> ids = vocab_.Encode(text);
  bool cut = static_cast<int>(ids.size()) > config_.max_tokens;
  if (cut) {
    spdlog::warn("regressor input of {} tokens truncated to {}", ids.size(),
                 config_.max_tokens);
    ids.resize(config_.max_tokens);
    ++truncations_;
  }
  if (truncated) *truncated = cut;
  // Pool over one padding row for empty inputs.
  if (ids.empty()) ids.push_back(nn::Vocabulary::kPad);
  return ids;
}

nn::Var ToxicityRegressor::Forward(nn::Graph &g,
                                   const std::vector<std::vector<int>> &ids,
                                   const nn::PassOptions &opts) const {
  nn::Var table = g.Param(embedding_);
  std::vector<nn::Var> pooled;
  pooled.reserve(ids.size());
  for (const std::vector<int> &seq : ids) {
    nn::Var x = g.Gather(table, seq);
    if (!layers_.empty()) {
      std::vector<int> pos(seq.size());
      std::iota(pos.begin(), pos.end(), 0);
      x = g.Add(x, g.Gather(g.Param(positions_), pos));
      for (const nn::EncoderLayer &layer : layers_) x = layer.Forward(g, x, opts);
    }
    pooled.push_back(g.MeanRows(x));
  }
  nn::Var h = g.Tanh(hidden_.Forward(g, g.ConcatRows(pooled)));
  h = opts.MaybeDropout(g, h);
  return g.Sigmoid(heads_.Forward(g, h));
}

ToxicityProbabilities ToxicityRegressor::Predict(const std::string &text,
                                                 bool *truncated) const {
  nn::Graph g(false);
  nn::Var out = Forward(g, {Encode(text, truncated)}, {});
  ToxicityProbabilities p;
  for (int j = 0; j < 6; ++j) p[j] = std::clamp(g.value(out)(0, j), 0.0, 1.0);
  return p;
}

std::vector<ToxicityProbabilities> ToxicityRegressor::PredictBatch(
    const std::vector<std::string> &texts) const {
  std::vector<ToxicityProbabilities> out;
  out.reserve(texts.size());
  constexpr size_t kChunk = 256;
  for (size_t start = 0; start < texts.size(); start += kChunk) {
    size_t end = std::min(texts.size(), start + kChunk);
    std::vector<std::vector<int>> ids;
    for (size_t i = start; i < end; ++i) ids.push_back(Encode(texts[i], nullptr));
    nn::Graph g(false);
    const nn::Matrix &v = g.value(Forward(g, ids, {}));
    for (size_t i = 0; i < ids.size(); ++i) {
      ToxicityProbabilities p;
      for (int j = 0; j < 6; ++j) p[j] = std::clamp(v(i, j), 0.0, 1.0);
      out.push_back(p);
    }
  }
  return out;
}

std::string ToxicityRegressor::checkpoint_id() const {
  uint64_t h = Fnv1a64(config_.Hash());
  for (const auto &p : store_.all()) {
    const nn::Matrix &m = p->value();
    h = Fnv1a64(std::string_view(reinterpret_cast<const char *>(m.data()),
                                 m.size() * sizeof(double)),
                h);
  }
  return "tox-" + ToHex(h);
}

void ToxicityRegressor::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  vocab_.Save(dir / "vocab.txt");
  store_.Save(dir / "weights.bin");
  WriteJsonAtomic(dir / "metadata.json",
                  {{"format", kFormat},
                   {"label_order", LabelOrderJson()},
                   {"dim", config_.dim},
                   {"heads", 6},
                   {"config", config_.ToJson()},
                   {"config_hash", config_.Hash()},
                   {"checkpoint_id", checkpoint_id()}});
}

std::unique_ptr<ToxicityRegressor> ToxicityRegressor::Load(
    const std::filesystem::path &dir) {
  Json meta = ReadJson(dir / "metadata.json");
  if (meta.value("format", "") != kFormat) {
    throw LoadError((dir / "metadata.json").string() +
                    ": not a toxicity regressor checkpoint");
  }
  if (meta.at("label_order") != LabelOrderJson()) {
    throw LoadError((dir / "metadata.json").string() +
                    ": label order " + meta.at("label_order").dump() +
                    " does not match " + LabelOrderJson().dump());
  }
  auto model = std::make_unique<ToxicityRegressor>(
      nn::Vocabulary::Load(dir / "vocab.txt"),
      RegressorConfig::FromJson(meta.at("config")));
  model->store_.Load(dir / "weights.bin");
  return model;
}

void StratifiedSplit(const std::vector<corpus::ToxicityRecord> &records,
                     double validation_fraction, uint64_t seed,
                     std::vector<corpus::ToxicityRecord> *train,
                     std::vector<corpus::ToxicityRecord> *validation) {
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw PreconditionError("validation fraction must lie in [0, 1)");
  }
  std::array<std::vector<size_t>, 10> deciles;
  for (size_t i = 0; i < records.size(); ++i) {
    int bucket = std::min(9, static_cast<int>(records[i].labels[0] * 10.0));
    deciles[bucket].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> held(records.size(), false);
  for (auto &bucket : deciles) {
    std::shuffle(bucket.begin(), bucket.end(), rng);
    size_t take = static_cast<size_t>(
        std::llround(validation_fraction * static_cast<double>(bucket.size())));
    for (size_t i = 0; i < take; ++i) held[bucket[i]] = true;
  }
  train->clear();
  validation->clear();
  for (size_t i = 0; i < records.size(); ++i) {
    (held[i] ? validation : train)->push_back(records[i]);
  }
}

double Rmse(const std::vector<ToxicityProbabilities> &predictions,
            const std::vector<std::array<double, 6>> &labels) {
  if (predictions.empty()) throw PreconditionError("RMSE of an empty split");
  if (predictions.size() != labels.size()) {
    throw PreconditionError("RMSE: prediction and label counts differ");
  }
  double sum = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    for (int j = 0; j < 6; ++j) {
      double e = predictions[i][j] - labels[i][j];
      sum += e * e;
    }
  }
  return std::sqrt(sum / (6.0 * static_cast<double>(predictions.size())));
}

double EvaluateRmse(const ToxicityRegressor &model,
                    const std::vector<corpus::ToxicityRecord> &records) {
  if (records.empty()) throw PreconditionError("RMSE of an empty split");
  std::vector<std::string> texts;
  std::vector<std::array<double, 6>> labels;
  for (const auto &r : records) {
    texts.push_back(r.text);
    labels.push_back(r.labels);
  }
  return Rmse(model.PredictBatch(texts), labels);
}

std::unique_ptr<ToxicityRegressor> TrainRegressor(
    const corpus::ToxicitySplit &train_split, const RegressorConfig &config,
    TrainingLog *log, const corpus::ToxicitySplit *validation_split) {
  if (train_split.records.empty()) {
    throw PreconditionError("cannot train the regressor on an empty split");
  }
  std::vector<corpus::ToxicityRecord> train, validation;
  if (validation_split) {
    train = train_split.records;
    validation = validation_split->records;
  } else {
    StratifiedSplit(train_split.records, config.validation_fraction,
                    MixSeed(config.seed, 1), &train, &validation);
  }
  if (train.empty()) throw PreconditionError("no training records after split");

  std::vector<std::string> texts;
  for (const auto &r : train) texts.push_back(r.text);
  auto model = std::make_unique<ToxicityRegressor>(
      nn::Vocabulary::Build(texts, {}, config.min_count, config.max_vocab),
      config);
  std::vector<std::vector<int>> encoded;
  for (const auto &r : train) encoded.push_back(model->Encode(r.text, nullptr));

  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  nn::Adam optimizer(model->store(), adam);
  std::mt19937_64 rng(MixSeed(config.seed, 2));
  nn::PassOptions opts{true, config.dropout, &rng};

  TrainingLog local;
  local.train_records = train.size();
  local.validation_records = validation.size();
  std::vector<nn::Matrix> best = model->store().Snapshot();
  double best_rmse = std::numeric_limits<double>::infinity();

  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0, sq_sum = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<size_t> rows(order.begin() + start, order.begin() + end);
      std::vector<std::vector<int>> ids;
      for (size_t r : rows) ids.push_back(encoded[r]);
      nn::Graph g;
      nn::Var loss = g.MseLoss(model->Forward(g, ids, opts), LabelMatrix(train, rows));
      const double value = g.Scalar(loss);
      if (!std::isfinite(value)) {
        throw TrainingError("regressor loss became " + std::to_string(value) +
                            " at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batches) +
                            "; weights are from the last finite step");
      }
      g.Backward(loss);
      if (!model->store().GradsFinite()) {
        model->store().ZeroGrad();
        throw TrainingError("regressor gradients became non-finite at epoch " +
                            std::to_string(epoch) + ", batch " +
                            std::to_string(batches));
      }
      optimizer.Step();
      loss_sum += value;
      sq_sum += value * 6.0 * static_cast<double>(rows.size());
      ++batches;
    }
    EpochLog e;
    e.epoch = epoch;
    e.train_loss = loss_sum / static_cast<double>(batches);
    e.train_rmse = std::sqrt(sq_sum / (6.0 * static_cast<double>(train.size())));
    e.validation_rmse =
        validation.empty() ? e.train_rmse : EvaluateRmse(*model, validation);
    spdlog::info("regressor epoch {}: loss {:.6f} train rmse {:.5f} "
                 "validation rmse {:.5f}",
                 epoch, e.train_loss, e.train_rmse, e.validation_rmse);
    local.epochs.push_back(e);
    if (e.validation_rmse < best_rmse) {
      best_rmse = e.validation_rmse;
      best = model->store().Snapshot();
      local.best_epoch = epoch;
    }
  }
  model->store().Restore(best);
  local.best_validation_rmse = best_rmse;
  if (log) *log = local;
  return model;
}

size_t PredictJsonLines(const ToxicityRegressor &model,
                        const std::filesystem::path &input,
                        const std::filesystem::path &output) {
  std::vector<Json> rows = ReadJsonLines(input);
  std::vector<std::string> texts;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].contains("id") || !rows[i].contains("text")) {
      throw LoadError(input.string() + ":" + std::to_string(i + 1) +
                      ": expected fields 'id' and 'text'");
    }
    texts.push_back(rows[i]["text"].get<std::string>());
  }
  std::vector<ToxicityProbabilities> probs = model.PredictBatch(texts);
  std::vector<Json> out;
  for (size_t i = 0; i < rows.size(); ++i) {
    Json row = {{"id", rows[i]["id"]}};
    for (int j = 0; j < 6; ++j) row["p" + std::to_string(j + 1)] = probs[i][j];
    out.push_back(row);
  }
  WriteJsonLinesAtomic(output, out);
  return out.size();
}

}  // namespace toxexplain::tox_regressor
