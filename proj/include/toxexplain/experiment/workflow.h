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

#ifndef TOXEXPLAIN_EXPERIMENT_WORKFLOW_H_
#define TOXEXPLAIN_EXPERIMENT_WORKFLOW_H_

#include <filesystem>
#include <string>

#include "toxexplain/corpus/dataset.h"
#include "toxexplain/experiment/runner.h"
#include "toxexplain/tox_regressor/regressor.h"

// Workspace-populating steps that precede experiment runs. Each writes its
// outputs atomically and can be rerun safely.
namespace toxexplain::experiment {

// Loads a raw explanation file and writes data/<id>/ splits plus a
// manifest.json with the split statistics.
corpus::ExplanationDataset PrepareDataset(const Workspace &workspace, const std::string &id,
                                          const std::filesystem::path &input,
                                          const corpus::ExplanationSchema &schema);

// Trains on a toxicity table and saves the model under regressor/<name>/
// together with training_log.json.
tox_regressor::TrainingLog TrainWorkspaceRegressor(const Workspace &workspace,
                                                   const std::string &name,
                                                   const std::filesystem::path &toxicity,
                                                   const corpus::ToxicitySchema &schema,
                                                   const tox_regressor::RegressorConfig &config);

// Regressor probabilities for every prepared split of a dataset. Returns
// the number of posts scored.
size_t InferAttributes(const Workspace &workspace, const std::string &dataset,
                       const std::string &regressor);

enum class TupleFormat { kDump, kLinearized };

// Builds kg/<id>/index/ and kg/<id>/tuples.txt. Returns the tuple count.
size_t BuildKnowledgeGraph(const Workspace &workspace, const std::string &id,
                           const std::filesystem::path &input, TupleFormat format);

}  // namespace toxexplain::experiment

#endif  // TOXEXPLAIN_EXPERIMENT_WORKFLOW_H_
