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

#include "toxexplain/experiment/workflow.h"

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/kg_retrieval/retrieval.h"

namespace toxexplain::experiment {

namespace fs = std::filesystem;
using corpus::SplitName;

corpus::ExplanationDataset PrepareDataset(const Workspace &workspace, const std::string &id,
                                          const fs::path &input,
                                          const corpus::ExplanationSchema &schema) {
  if (!fs::exists(input)) throw MissingArtifactError("input file " + input.string() + " not found");
  auto dataset = corpus::LoadExplanationDataset(input, schema);
  const fs::path dir = workspace.DatasetDir(id);
  fs::create_directories(dir);
  for (const auto *split : {&dataset.train, &dataset.test, &dataset.validation}) {
    corpus::WriteSplit(workspace.SplitPath(id, split->name), *split);
  }
  Json manifest = dataset.ManifestJson();
  manifest["input"] = input.string();
  manifest["source"] = corpus::SourceDatasetName(dataset.source);
  WriteJsonAtomic(dir / "manifest.json", manifest);
  return dataset;
}

tox_regressor::TrainingLog TrainWorkspaceRegressor(const Workspace &workspace,
                                                   const std::string &name,
                                                   const fs::path &toxicity,
                                                   const corpus::ToxicitySchema &schema,
                                                   const tox_regressor::RegressorConfig &config) {
  if (!fs::exists(toxicity)) {
    throw MissingArtifactError("toxicity table " + toxicity.string() + " not found");
  }
  const auto data = corpus::LoadToxicityDataset(toxicity, schema);
  tox_regressor::TrainingLog log;
  auto model = tox_regressor::TrainRegressor(data, config, &log);
  const fs::path dir = workspace.RegressorDir(name);
  model->Save(dir);
  Json j = log.ToJson();
  j["checkpoint_id"] = model->checkpoint_id();
  WriteJsonAtomic(dir / "training_log.json", j);
  return log;
}

size_t InferAttributes(const Workspace &workspace, const std::string &dataset,
                       const std::string &regressor) {
  const fs::path dir = workspace.RegressorDir(regressor);
  if (!fs::exists(dir)) {
    throw MissingArtifactError("regressor " + dir.string() +
                               " not found; run `toxexplain train-regressor` first");
  }
  const auto model = tox_regressor::ToxicityRegressor::Load(dir);
  size_t scored = 0;
  bool any = false;
  for (SplitName s : {SplitName::kTrain, SplitName::kTest, SplitName::kValidation}) {
    if (!fs::exists(workspace.SplitPath(dataset, s))) continue;
    any = true;
    std::map<std::string, attributes::ToxicityProbabilities> probs;
    for (const auto &r : workspace.ReadDatasetSplit(dataset, s).records) {
      probs[r.post.id] = model->Predict(r.post.text);
    }
    scored += probs.size();
    WriteAttributeFile(workspace.AttributePath(dataset, s), probs, model->checkpoint_id());
  }
  if (!any) {
    throw MissingArtifactError("dataset " + dataset + " has no prepared splits; run "
                               "`toxexplain prepare` first");
  }
  if (model->truncation_count() > 0) {
    spdlog::warn("{} posts exceeded the regressor's token limit and were truncated",
                 model->truncation_count());
  }
  return scored;
}

size_t BuildKnowledgeGraph(const Workspace &workspace, const std::string &id,
                           const fs::path &input, TupleFormat format) {
  if (!fs::exists(input)) throw MissingArtifactError("tuple file " + input.string() + " not found");
  auto tuples = format == TupleFormat::kDump ? kg_retrieval::LoadTupleDump(input)
                                             : kg_retrieval::LoadLinearizedTuples(input);
  if (tuples.empty()) throw LoadError(input.string() + ": no usable tuples");
  const auto index = kg_retrieval::KnowledgeIndex::Build(std::move(tuples));
  index.Save(workspace.KgIndexDir(id));
  std::string text;
  for (const auto &t : index.tuples()) text += t.linearized + "\n";
  WriteFileAtomic(workspace.KgTuplesPath(id), text);
  return index.tuples().size();
}

}  // namespace toxexplain::experiment
