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

#include "toxexplain/generator/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/nn/optimizer.h"

namespace toxexplain::generator {

void TrainerConfig::Validate() const {
  if (epochs < 1 || batch_size < 1) {
    throw PreconditionError("trainer needs epochs >= 1 and batch_size >= 1");
  }
  if (!(learning_rate > 0.0)) {
    throw PreconditionError("learning rate must be positive");
  }
}

Json TrainerConfig::ToJson() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"weight_decay", weight_decay},
          {"clip_norm", clip_norm},
          {"seed", seed}};
}

TrainerConfig TrainerConfig::FromJson(const Json &json) {
  TrainerConfig c;
  c.epochs = json.value("epochs", c.epochs);
  c.batch_size = json.value("batch_size", c.batch_size);
  c.learning_rate = json.value("learning_rate", c.learning_rate);
  c.weight_decay = json.value("weight_decay", c.weight_decay);
  c.clip_norm = json.value("clip_norm", c.clip_norm);
  c.seed = json.value("seed", c.seed);
  c.failure_checkpoint = json.value("failure_checkpoint", "");
  c.Validate();
  return c;
}

Json GeneratorTrainLog::ToJson() const {
  return {{"step_losses", step_losses},
          {"epoch_losses", epoch_losses},
          {"pairs", pairs}};
}

nn::Vocabulary BuildGeneratorVocabulary(const std::vector<TrainingPair> &pairs,
                                        size_t min_count, size_t max_size) {
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 3);
  for (const TrainingPair &p : pairs) {
    texts.push_back(p.input.source);
    texts.push_back(p.input.attributes);
    texts.push_back(p.target);
  }
  // Prompt phrases may appear at inference time only (ablations), so keep
  // their words in the vocabulary as well.
  for (const auto &e : attributes::PromptTable::Default().entries()) {
    texts.push_back(e.prompt);
  }
  return nn::Vocabulary::Build(texts, GeneratorSpecialTokens(), min_count, max_size);
}

std::unique_ptr<Seq2SeqModel> TrainGenerator(const std::vector<TrainingPair> &pairs,
                                             const ModelConfig &model_config,
                                             const TrainerConfig &trainer_config,
                                             GeneratorTrainLog *log) {
  if (pairs.empty()) {
    throw PreconditionError("cannot train the generator without examples");
  }
  auto model = std::make_unique<Seq2SeqModel>(BuildGeneratorVocabulary(pairs),
                                               model_config);
  TrainModel(*model, pairs, trainer_config, log);
  return model;
}

void TrainModel(Seq2SeqModel &model, const std::vector<TrainingPair> &pairs,
                const TrainerConfig &config, GeneratorTrainLog *log) {
  config.Validate();
  if (pairs.empty()) {
    throw PreconditionError("cannot train the generator without examples");
  }
  std::vector<EncodedExample> examples;
  examples.reserve(pairs.size());
  for (const TrainingPair &p : pairs) examples.push_back(model.Encode(p.input, &p.target));

  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  adam.clip_norm = config.clip_norm;
  nn::Adam optimizer(model.store(), adam);
  std::mt19937_64 rng(MixSeed(config.seed, 0x7e));
  nn::PassOptions opts{true, model.config().dropout, &rng};

  GeneratorTrainLog local;
  local.pairs = pairs.size();
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  // Divergence is caught before the optimizer step, so the weights in the
  // store are still the last finite ones.
  auto diverged = [&](const std::string &what, int epoch, size_t step) {
    model.store().ZeroGrad();
    std::string message = "generator " + what + " at epoch " +
                          std::to_string(epoch) + ", step " + std::to_string(step);
    if (!config.failure_checkpoint.empty()) {
      model.Save(config.failure_checkpoint);
      message += "; last finite weights saved to " + config.failure_checkpoint;
    }
    throw TrainingError(message);
  };

  model.store().ZeroGrad();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    size_t epoch_steps = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      double batch_loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        nn::Graph g;
        nn::Var loss = model.Loss(g, examples[order[i]], opts);
        const double value = g.Scalar(loss);
        if (!std::isfinite(value)) {
          diverged("loss became " + std::to_string(value), epoch,
                   local.step_losses.size());
        }
        batch_loss += value * weight;
        g.Backward(g.Scale(loss, weight));
      }
      if (!model.store().GradsFinite()) {
        diverged("gradients became non-finite", epoch, local.step_losses.size());
      }
      optimizer.Step();
      local.step_losses.push_back(batch_loss);
      epoch_sum += batch_loss;
      ++epoch_steps;
    }
    local.epoch_losses.push_back(epoch_sum / static_cast<double>(epoch_steps));
    spdlog::info("generator epoch {}: loss {:.6f}", epoch, local.epoch_losses.back());
  }
  if (log) *log = std::move(local);
}

}  // namespace toxexplain::generator
