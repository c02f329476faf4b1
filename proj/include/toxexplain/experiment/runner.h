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

#ifndef TOXEXPLAIN_EXPERIMENT_RUNNER_H_
#define TOXEXPLAIN_EXPERIMENT_RUNNER_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/corpus/dataset.h"
#include "toxexplain/evaluation/metrics.h"
#include "toxexplain/experiment/config.h"
#include "toxexplain/generator/decode.h"
#include "toxexplain/generator/model.h"
#include "toxexplain/generator/trainer.h"

namespace toxexplain::experiment {

// On-disk layout shared by every subcommand.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path &root() const { return root_; }
  std::filesystem::path DatasetDir(const std::string &dataset) const;
  std::filesystem::path SplitPath(const std::string &dataset, corpus::SplitName split) const;
  std::filesystem::path RegressorDir(const std::string &name) const;
  std::filesystem::path AttributePath(const std::string &dataset,
                                      corpus::SplitName split) const;
  std::filesystem::path KgDir(const std::string &kg) const;
  std::filesystem::path KgIndexDir(const std::string &kg) const;
  std::filesystem::path KgTuplesPath(const std::string &kg) const;
  std::filesystem::path KgCachePath(const std::string &kg, const std::string &dataset) const;
  std::filesystem::path RunDir(const ExperimentConfig &config) const;
  std::filesystem::path ResultsDir() const;
  std::filesystem::path ResultPath(const ExperimentConfig &config) const;
  std::filesystem::path ReportsDir() const;

  // Throws MissingArtifactError naming the subcommand that produces the
  // split when it is absent.
  corpus::ExplanationSplit ReadDatasetSplit(const std::string &dataset,
                                            corpus::SplitName split) const;

 private:
  std::filesystem::path root_;
};

// Regressor probabilities per post, as written by attr-infer.
void WriteAttributeFile(const std::filesystem::path &path,
                        const std::map<std::string, attributes::ToxicityProbabilities> &probs,
                        const std::string &checkpoint_id);
std::map<std::string, attributes::ToxicityProbabilities> ReadAttributeFile(
    const std::filesystem::path &path);

struct PreparedExample {
  std::string post_id;
  std::string post;
  generator::ModelInput input;
  std::vector<std::string> references;
};

// Model inputs for one split under the config's infusion settings.
std::vector<PreparedExample> PrepareExamples(const Workspace &workspace,
                                             const ExperimentConfig &config,
                                             corpus::SplitName split);

// The attribute string a token-style infusion sees for one post.
attributes::AttributeString AttributeStringFor(const ExperimentConfig &config,
                                               const std::string &post_id,
                                               const attributes::ToxicityProbabilities &probs);
attributes::ToxicityProbabilities ProbabilitiesFor(
    const ExperimentConfig &config, const std::string &post_id,
    const attributes::ToxicityProbabilities &regressor_probs);

// Scores generations against the (limited) test split of `dataset`.
// Only the given generations are scored. toxicity_scorer is "none" or
// "regressor".
evaluation::MetricReport EvaluateGenerations(
    const Workspace &workspace, const std::string &dataset, size_t test_limit,
    const std::string &toxicity_scorer, const std::string &regressor,
    const std::vector<generator::GeneratedExplanation> &generations);

// Compiler, platform and library details recorded with every result.
Json EnvironmentFingerprint();

struct ExperimentResult {
  std::string kind = "generator";  // or "zeroshot"
  std::string config_hash;
  uint64_t seed = 0;
  Json config;
  evaluation::MetricReport metrics;
  double wall_clock_seconds = 0.0;
  Json environment;
  Json training;
  // Loaded from an existing result file rather than computed.
  bool cache_hit = false;

  Json ToJson() const;
  static ExperimentResult FromJson(const Json &j);
  static ExperimentResult Load(const std::filesystem::path &path);
};

// Every result file under a directory, sorted by file name.
std::vector<ExperimentResult> LoadResults(const std::filesystem::path &dir);

class ExperimentRunner {
 public:
  explicit ExperimentRunner(Workspace workspace);

  // Train, generate and evaluate, reusing every cached stage. A result
  // file already present for the config hash and seed is returned as is.
  ExperimentResult Run(const ExperimentConfig &config);

  // Trains, or loads the cached model for this config and seed.
  std::unique_ptr<generator::Seq2SeqModel> Train(const ExperimentConfig &config);
  // Generates for the test split, or loads cached generations.
  std::vector<generator::GeneratedExplanation> Generate(const ExperimentConfig &config);
  // Scores generations against the test references.
  evaluation::MetricReport Evaluate(
      const ExperimentConfig &config,
      const std::vector<generator::GeneratedExplanation> &generations) const;

  const Workspace &workspace() const { return workspace_; }
  // Trainings actually performed by this runner (cache hits excluded).
  size_t trainings() const { return trainings_; }

 private:
  Workspace workspace_;
  size_t trainings_ = 0;
};

// Config with the run seed pushed into model and trainer.
ExperimentConfig Seeded(const ExperimentConfig &config);

struct AblationVariant {
  std::string name;
  ExperimentConfig config;
};

// The ten ablations of a c1 base: plain-prompt rendering, two thresholds,
// three probability perturbations and four label flips.
std::vector<AblationVariant> AblationGrid(const ExperimentConfig &base);
// Label for a c1 config that belongs to the ablation table ("base" for the
// unmodified c1), or nullopt.
std::optional<std::string> AblationLabel(const ExperimentConfig &config);
// Runs the base followed by the ten variants.
std::vector<ExperimentResult> RunAblationSuite(ExperimentRunner &runner,
                                               const ExperimentConfig &base);

}  // namespace toxexplain::experiment

#endif  // TOXEXPLAIN_EXPERIMENT_RUNNER_H_
