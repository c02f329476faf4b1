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

#include "toxexplain/experiment/config.h"

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::experiment {

using generator::Infusion;

std::string AttributeSourceName(AttributeSource source) {
  switch (source) {
    case AttributeSource::kRegressor:
      return "regressor";
    case AttributeSource::kInDataset:
      return "in_dataset";
    case AttributeSource::kPerturbed:
      return "perturbed";
    case AttributeSource::kFlipped:
      return "flipped";
  }
  return "regressor";
}

AttributeSource ParseAttributeSource(const std::string &name) {
  for (AttributeSource s : {AttributeSource::kRegressor, AttributeSource::kInDataset,
                            AttributeSource::kPerturbed, AttributeSource::kFlipped}) {
    if (AttributeSourceName(s) == name) return s;
  }
  throw PreconditionError("unknown attribute source '" + name +
                          "' (expected regressor, in_dataset, perturbed or flipped)");
}

Json KgSpec::ToJson() const {
  Json j = selection.ToJson();
  j["id"] = id;
  j["scorer"] = kg_retrieval::ScorerName(scorer);
  if (scorer == kg_retrieval::Scorer::kCosine) j["encoder"] = encoder;
  return j;
}

KgSpec KgSpec::FromJson(const Json &j) {
  KgSpec s;
  s.id = j.at("id").get<std::string>();
  const std::string scorer = j.value("scorer", "idf_relevance");
  if (scorer == "idf_relevance") {
    s.scorer = kg_retrieval::Scorer::kIdfRelevance;
  } else if (scorer == "cosine") {
    s.scorer = kg_retrieval::Scorer::kCosine;
  } else {
    throw PreconditionError("unknown kg scorer '" + scorer + "'");
  }
  s.selection.mode = kg_retrieval::ParseSelectionMode(j.value("mode", "top"));
  s.selection.k = j.value("k", 20);
  if (j.contains("seed") && !j["seed"].is_null()) s.selection.seed = j["seed"].get<uint64_t>();
  if (s.selection.k < 1) throw PreconditionError("kg k must be at least 1");
  if (j.contains("encoder")) s.encoder = j["encoder"];
  return s;
}

bool ExperimentConfig::UsesAttributes() const {
  return infusion != Infusion::kNone && infusion != Infusion::kKg;
}

bool ExperimentConfig::NeedsRegressorProbabilities() const {
  return UsesAttributes() && (attribute_source == AttributeSource::kRegressor ||
                              attribute_source == AttributeSource::kFlipped);
}

void ExperimentConfig::Validate() const {
  if (Trim(dataset).empty()) throw PreconditionError("config needs a dataset id");
  const bool kg_run = infusion == Infusion::kKg;
  if (kg_run != kg.has_value()) {
    throw PreconditionError(kg_run ? "kg infusion needs a 'kg' block"
                                   : "a 'kg' block is only allowed with kg infusion; "
                                     "attribute and kg infusion are separate runs");
  }
  if (kg && Trim(kg->id).empty()) throw PreconditionError("kg block needs an id");
  if (UsesAttributes()) {
    attributes.Validate();
    const bool c2 = infusion == Infusion::kC2;
    if (c2 != (attribute_source == AttributeSource::kInDataset)) {
      throw PreconditionError("c2 infusion uses in-dataset attributes, and in-dataset "
                              "attributes are only used by c2");
    }
    if (attribute_source == AttributeSource::kFlipped && infusion == Infusion::kC3) {
      throw PreconditionError("flipping acts on attribute tokens; c3 consumes "
                              "probabilities");
    }
    if (attributes.rendering == attributes::Rendering::kPlainPrompt &&
        (c2 || infusion == Infusion::kC3)) {
      throw PreconditionError("plain-prompt rendering applies to token infusions only");
    }
  }
  if (toxicity_scorer != "none" && toxicity_scorer != "regressor") {
    throw PreconditionError("toxicity_scorer must be 'none' or 'regressor'");
  }
  model.Validate();
  trainer.Validate();
  decode.Validate();
}

Json ExperimentConfig::ToJson() const {
  Json j = Canonical();
  j["name"] = name;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  if (!UsesAttributes()) {
    // Keep the full form readable even when the options are unused.
    j["attribute_source"] = AttributeSourceName(attribute_source);
  }
  return j;
}

Json ExperimentConfig::Canonical() const {
  Json model_json = model.ToJson();
  model_json.erase("seed");
  model_json.erase("infusion");
  Json trainer_json = trainer.ToJson();
  trainer_json.erase("seed");
  Json j{{"dataset", dataset},
         {"infusion", generator::InfusionName(infusion)},
         {"model", model_json},
         {"trainer", trainer_json},
         {"decode", decode.ToJson()},
         {"train_limit", train_limit},
         {"test_limit", test_limit},
         {"toxicity_scorer", toxicity_scorer}};
  if (toxicity_scorer == "regressor" || NeedsRegressorProbabilities()) {
    j["regressor"] = regressor;
  }
  if (UsesAttributes()) {
    j["attribute_source"] = AttributeSourceName(attribute_source);
    j["post_first"] = post_first;
    if (attribute_source != AttributeSource::kInDataset) {
      j["attributes"] = attributes.ToJson();
    }
    if (attribute_source == AttributeSource::kPerturbed) {
      j["perturb"] = attributes::PerturbModeName(perturb);
    }
    if (attribute_source == AttributeSource::kFlipped) {
      j["flip_label"] = attributes::LabelName(flip_label);
    }
  }
  if (kg) j["kg"] = kg->ToJson();
  return j;
}

std::string ExperimentConfig::Hash() const { return ToHex(Fnv1a64(Canonical().dump())); }

ExperimentConfig ExperimentConfig::FromJson(const Json &j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", "");
    c.dataset = j.value("dataset", c.dataset);
    const std::string infusion = j.value("infusion", "none");
    auto parsed = generator::ParseInfusion(infusion);
    if (!parsed) throw PreconditionError("unknown infusion '" + infusion + "'");
    c.infusion = *parsed;
    c.attribute_source = ParseAttributeSource(
        j.value("attribute_source", c.infusion == Infusion::kC2 ? "in_dataset" : "regressor"));
    if (j.contains("perturb")) {
      auto mode = attributes::ParsePerturbMode(j["perturb"].get<std::string>());
      if (!mode) throw PreconditionError("unknown perturb mode '" + j["perturb"].dump() + "'");
      c.perturb = *mode;
    }
    if (j.contains("flip_label")) {
      auto label = attributes::ParseLabel(j["flip_label"].get<std::string>());
      if (!label) throw PreconditionError("unknown label '" + j["flip_label"].dump() + "'");
      c.flip_label = *label;
    }
    if (j.contains("attributes")) c.attributes = attributes::AttributeConfig::FromJson(j["attributes"]);
    c.post_first = j.value("post_first", true);
    if (j.contains("kg") && !j["kg"].is_null()) c.kg = KgSpec::FromJson(j["kg"]);
    c.seed = j.value("seed", c.seed);
    Json model_json = j.value("model", Json::object());
    model_json["infusion"] = generator::InfusionName(c.infusion);
    model_json["seed"] = c.seed;
    c.model = generator::ModelConfig::FromJson(model_json);
    Json trainer_json = j.value("trainer", Json::object());
    trainer_json["seed"] = c.seed;
    c.trainer = generator::TrainerConfig::FromJson(trainer_json);
    c.decode = generator::DecodeParams::FromJson(j.value("decode", Json::object()));
    c.train_limit = j.value("train_limit", size_t{0});
    c.test_limit = j.value("test_limit", size_t{0});
    c.toxicity_scorer = j.value("toxicity_scorer", c.toxicity_scorer);
    c.regressor = j.value("regressor", c.regressor);
    c.output_dir = j.value("output_dir", "");
  } catch (const Json::exception &e) {
    throw PreconditionError(std::string("bad experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path &path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("experiment config " + path.string() + " not found");
  }
  try {
    return FromJson(ReadJson(path));
  } catch (const PreconditionError &e) {
    throw PreconditionError(path.string() + ": " + e.what());
  }
}

}  // namespace toxexplain::experiment
