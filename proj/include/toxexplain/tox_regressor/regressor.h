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

#ifndef TOXEXPLAIN_TOX_REGRESSOR_REGRESSOR_H_
#define TOXEXPLAIN_TOX_REGRESSOR_REGRESSOR_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/attributes/attributes.h"
#include "toxexplain/common/io.h"
#include "toxexplain/corpus/dataset.h"
#include "toxexplain/nn/layers.h"
#include "toxexplain/nn/parameters.h"
#include "toxexplain/nn/vocab.h"

namespace toxexplain::tox_regressor {

using attributes::ToxicityProbabilities;

struct RegressorConfig {
  int dim = 64;             // token embedding width
  int hidden = 64;          // width of the shared hidden layer
  int encoder_layers = 0;   // 0 = mean-pooled bag of embeddings
  int heads = 4;
  int max_tokens = 128;     // longer inputs are truncated with a warning
  size_t min_count = 2;
  size_t max_vocab = 50000;
  int epochs = 2;
  int batch_size = 32;
  double learning_rate = 3e-3;
  double weight_decay = 0.0;
  double dropout = 0.0;
  double validation_fraction = 0.05;
  uint64_t seed = 13;

  Json ToJson() const;
  static RegressorConfig FromJson(const Json &json);
  // Stable fingerprint of the architecture and training settings.
  std::string Hash() const;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;   // mean batch loss
  double train_rmse = 0.0;
  double validation_rmse = 0.0;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_validation_rmse = 0.0;
  size_t train_records = 0;
  size_t validation_records = 0;

  Json ToJson() const;
};

// Six sigmoid heads over a shared text encoder.
class ToxicityRegressor {
 public:
  ToxicityRegressor(nn::Vocabulary vocab, RegressorConfig config);

  ToxicityRegressor(const ToxicityRegressor &) = delete;
  ToxicityRegressor &operator=(const ToxicityRegressor &) = delete;

  // Deterministic; thread-safe on a loaded model. `truncated` reports
  // whether the input exceeded max_tokens (a warning is logged as well).
  ToxicityProbabilities Predict(const std::string &text,
                                bool *truncated = nullptr) const;
  std::vector<ToxicityProbabilities> PredictBatch(
      const std::vector<std::string> &texts) const;

  void Save(const std::filesystem::path &dir) const;
  static std::unique_ptr<ToxicityRegressor> Load(const std::filesystem::path &dir);

  const RegressorConfig &config() const { return config_; }
  const nn::Vocabulary &vocab() const { return vocab_; }
  nn::ParameterStore &store() { return store_; }
  // Content hash of the weights and config.
  std::string checkpoint_id() const;
  size_t truncation_count() const { return truncations_.load(); }

  // Builds the forward pass for a batch; rows of the result are the six
  // probabilities per input. Exposed for training.
  nn::Var Forward(nn::Graph &g, const std::vector<std::vector<int>> &ids,
                  const nn::PassOptions &opts) const;
  std::vector<int> Encode(const std::string &text, bool *truncated) const;

 private:
  RegressorConfig config_;
  nn::Vocabulary vocab_;
  nn::ParameterStore store_;
  nn::Parameter *embedding_ = nullptr;
  nn::Parameter *positions_ = nullptr;
  std::vector<nn::EncoderLayer> layers_;
  nn::Linear hidden_;
  nn::Linear heads_;
  mutable std::atomic<size_t> truncations_{0};
};

// Splits records into train/validation, stratified by the decile of the
// toxicity label, deterministically from the seed.
void StratifiedSplit(const std::vector<corpus::ToxicityRecord> &records,
                     double validation_fraction, uint64_t seed,
                     std::vector<corpus::ToxicityRecord> *train,
                     std::vector<corpus::ToxicityRecord> *validation);

// Trains on `train`, holding out a stratified validation slice unless one
// is passed explicitly. Returns the checkpoint with the best validation
// RMSE.
std::unique_ptr<ToxicityRegressor> TrainRegressor(
    const corpus::ToxicitySplit &train, const RegressorConfig &config,
    TrainingLog *log = nullptr,
    const corpus::ToxicitySplit *validation = nullptr);

// sqrt of the mean squared error over all records and all six heads.
double Rmse(const std::vector<ToxicityProbabilities> &predictions,
            const std::vector<std::array<double, 6>> &labels);
double EvaluateRmse(const ToxicityRegressor &model,
                    const std::vector<corpus::ToxicityRecord> &records);

// Reads JSON lines of {id, text} and writes {id, p1..p6}.
size_t PredictJsonLines(const ToxicityRegressor &model,
                        const std::filesystem::path &input,
                        const std::filesystem::path &output);

}  // namespace toxexplain::tox_regressor

#endif  // TOXEXPLAIN_TOX_REGRESSOR_REGRESSOR_H_
