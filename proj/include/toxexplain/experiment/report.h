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

#ifndef TOXEXPLAIN_EXPERIMENT_REPORT_H_
#define TOXEXPLAIN_EXPERIMENT_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "toxexplain/analysis/statistics.h"
#include "toxexplain/experiment/runner.h"

namespace toxexplain::experiment {

// Display name of a run: the config name when set, else built from the
// infusion settings.
std::string RunLabel(const ExperimentResult &result);

struct ReportTables {
  // Main comparison: BLEU, ROUGE-L x100, BERTScore x100 per run.
  std::string main;
  // Ablation variants of the c1 model.
  std::string ablations;
  // Paired tests among KG selection modes and against the plain model.
  std::string significance;
  // KG-infused runs.
  std::string knowledge;
  // Runs left out because a reference metric was absent.
  std::vector<std::string> skipped;
};

// Every cell is filled; runs without the three reference metrics are
// listed in `skipped` instead of producing empty cells.
ReportTables BuildReport(const std::vector<ExperimentResult> &results);

// table2.csv, table4.csv, table6.csv and table8.csv under `dir`.
std::vector<std::filesystem::path> WriteReport(const ReportTables &tables,
                                               const std::filesystem::path &dir);

// Scores of every cached selection in a retrieval cache, optionally
// restricted to one scorer and selection mode.
analysis::ScoreLists LoadRetrievalScores(const std::filesystem::path &cache_path,
                                         const std::string &scorer = "",
                                         const std::string &mode = "");

}  // namespace toxexplain::experiment

#endif  // TOXEXPLAIN_EXPERIMENT_REPORT_H_
