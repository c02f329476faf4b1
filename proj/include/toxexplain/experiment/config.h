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

#ifndef TOXEXPLAIN_EXPERIMENT_CONFIG_H_
#define TOXEXPLAIN_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "toxexplain/attributes/attributes.h"
#include "toxexplain/common/io.h"
#include "toxexplain/generator/decode.h"
#include "toxexplain/generator/inputs.h"
#include "toxexplain/generator/model.h"
#include "toxexplain/generator/trainer.h"
#include "toxexplain/kg_retrieval/retrieval.h"

namespace toxexplain::experiment {

enum class AttributeSource {
  kRegressor,   // thresholded regressor probabilities
  kInDataset,   // dataset annotations
  kPerturbed,   // probabilities replaced by zeros, ones or random values
  kFlipped,     // regressor tokens with one label flipped
};
std::string AttributeSourceName(AttributeSource source);
AttributeSource ParseAttributeSource(const std::string &name);

struct KgSpec {
  // Directory name under the workspace's kg/ folder.
  std::string id;
  kg_retrieval::Scorer scorer = kg_retrieval::Scorer::kIdfRelevance;
  // A random selection without a seed draws from the experiment seed.
  kg_retrieval::RetrievalSelection selection;
  // Sentence encoder for cosine scoring (see embedding::MakeEncoder).
  Json encoder = Json{{"type", "hashed_ngram"}, {"dim", 512}};

  Json ToJson() const;
  static KgSpec FromJson(const Json &j);
};

struct ExperimentConfig {
  // Display label; not part of the hash.
  std::string name;
  // Prepared dataset under the workspace's data/ folder.
  std::string dataset = "sbic";
  generator::Infusion infusion = generator::Infusion::kNone;
  AttributeSource attribute_source = AttributeSource::kRegressor;
  attributes::PerturbMode perturb = attributes::PerturbMode::kAllZeros;
  attributes::ToxicityLabel flip_label = attributes::ToxicityLabel::kToxicity;
  attributes::AttributeConfig attributes;
  bool post_first = true;
  std::optional<KgSpec> kg;
  generator::ModelConfig model;
  generator::TrainerConfig trainer;
  generator::DecodeParams decode;
  // Use only the first N posts of a split (0: all).
  size_t train_limit = 0;
  size_t test_limit = 0;
  // "none" or "regressor" (workspace regressor of that name).
  std::string toxicity_scorer = "none";
  std::string regressor = "default";
  uint64_t seed = 1;
  // Where results go; defaults to the workspace results/ folder. Not hashed.
  std::string output_dir;

  // Throws PreconditionError on inconsistent combinations.
  void Validate() const;
  // Full form including name, seed and output_dir.
  Json ToJson() const;
  static ExperimentConfig FromJson(const Json &j);
  static ExperimentConfig Load(const std::filesystem::path &path);

  // Only the fields that define the run, with irrelevant options dropped
  // (attribute settings for none/kg, the KG block otherwise).
  Json Canonical() const;
  // FNV-1a over the canonical JSON (object keys are sorted, so field
  // order in the file does not matter).
  std::string Hash() const;

  bool UsesAttributes() const;
  bool NeedsRegressorProbabilities() const;
};

}  // namespace toxexplain::experiment

#endif  // TOXEXPLAIN_EXPERIMENT_CONFIG_H_
