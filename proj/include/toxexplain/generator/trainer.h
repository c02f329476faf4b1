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

#ifndef TOXEXPLAIN_GENERATOR_TRAINER_H_
#define TOXEXPLAIN_GENERATOR_TRAINER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/generator/model.h"

namespace toxexplain::generator {

struct TrainerConfig {
  int epochs = 10;
  int batch_size = 8;
  double learning_rate = 3e-4;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  uint64_t seed = 1;  // shuffling and dropout
  // When set, a diverged run saves its last finite weights here.
  std::string failure_checkpoint;

  void Validate() const;
  Json ToJson() const;
  static TrainerConfig FromJson(const Json &json);
};

// One (input, target) pair; posts with several references contribute one
// pair per reference.
struct TrainingPair {
  std::string post_id;
  ModelInput input;
  std::string target;
};

struct GeneratorTrainLog {
  std::vector<double> step_losses;   // mean loss of each optimizer step
  std::vector<double> epoch_losses;  // mean step loss per epoch
  size_t pairs = 0;

  Json ToJson() const;
};

// Builds a vocabulary covering every source, attribute and target string.
nn::Vocabulary BuildGeneratorVocabulary(const std::vector<TrainingPair> &pairs,
                                        size_t min_count = 1,
                                        size_t max_size = 0);

std::unique_ptr<Seq2SeqModel> TrainGenerator(const std::vector<TrainingPair> &pairs,
                                             const ModelConfig &model_config,
                                             const TrainerConfig &trainer_config,
                                             GeneratorTrainLog *log = nullptr);

// Continues training an existing model in place.
void TrainModel(Seq2SeqModel &model, const std::vector<TrainingPair> &pairs,
                const TrainerConfig &config, GeneratorTrainLog *log = nullptr);

}  // namespace toxexplain::generator

#endif  // TOXEXPLAIN_GENERATOR_TRAINER_H_
