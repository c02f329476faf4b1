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

#ifndef TOXEXPLAIN_SYNTH_SYNTH_H_
#define TOXEXPLAIN_SYNTH_SYNTH_H_

// Synthetic stand-ins for the explanation, toxicity and knowledge-graph
// corpora. Every group name and slur is invented; the generators exist so
// the pipeline can be exercised end to end without the licensed datasets.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toxexplain/corpus/dataset.h"

namespace toxexplain::synth {

struct ToxicityCorpusOptions {
  size_t records = 10000;
  double toxic_fraction = 0.35;
  double label_noise = 0.03;
  uint64_t seed = 1;
};

std::vector<corpus::ToxicityRecord> MakeToxicityRecords(
    const ToxicityCorpusOptions &options);

// CSV in the default toxicity schema (id, text, six label columns).
std::string ToxicityCsv(const std::vector<corpus::ToxicityRecord> &records);

// Hand-written probes: ten harmless sentences and ten carrying the
// invented slurs.
const std::vector<std::string> &BenignFixtures();
const std::vector<std::string> &SlurFixtures();

struct ExplanationCorpusOptions {
  corpus::SourceDataset source = corpus::SourceDataset::kSbicLike;
  size_t train_posts = 200;
  size_t test_posts = 50;
  size_t validation_posts = 0;
  // SBIC-like posts get 1..max_references annotations.
  int max_references = 3;
  // Fraction of SBIC-like annotation rows with an empty explanation.
  double empty_explanation_rate = 0.02;
  uint64_t seed = 1;
};

// Rows in the default explanation schema for the chosen source: CSV for
// SBIC-like, JSON lines for LatentHatred-like.
std::string MakeExplanationTable(const ExplanationCorpusOptions &options);

struct KnowledgeGraphOptions {
  size_t tuples = 100;
  uint64_t seed = 1;
};

// TSV with header head, relation, tail, weight.
std::string MakeConceptNetStyleTsv(const KnowledgeGraphOptions &options);

// One linearized stereotype tuple per line.
std::vector<std::string> MakeStereoTuples(const KnowledgeGraphOptions &options);

// Writes a complete demo workspace (explanation corpora, toxicity corpus,
// both knowledge graphs) under `dir`, returning the file paths written.
struct DemoDataOptions {
  size_t explanation_train = 200;
  size_t explanation_test = 50;
  size_t toxicity_records = 10000;
  size_t kg_tuples = 2000;
  uint64_t seed = 1;
};

std::vector<std::filesystem::path> WriteDemoData(const std::filesystem::path &dir,
                                                 const DemoDataOptions &options);

}  // namespace toxexplain::synth

#endif  // TOXEXPLAIN_SYNTH_SYNTH_H_
