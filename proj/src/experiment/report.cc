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

#include "toxexplain/experiment/report.h"

#include <cstdio>
#include <map>
#include <tuple>

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::experiment {

namespace fs = std::filesystem;

namespace {

std::string Fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

bool HasReferenceMetrics(const ExperimentResult &r) {
  return r.metrics.max_bleu && r.metrics.rouge_l_f1 && r.metrics.bert_score_f1;
}

std::optional<ExperimentConfig> ParseConfig(const ExperimentResult &r) {
  if (r.kind != "generator") return std::nullopt;
  try {
    return ExperimentConfig::FromJson(r.config);
  } catch (const Error &e) {
    spdlog::warn("result {}: unreadable config ({})", r.config_hash, e.what());
    return std::nullopt;
  }
}

std::string KgLabel(const KgSpec &kg) {
  return "kg_" + kg_retrieval::SelectionModeName(kg.selection.mode) + "_k" +
         std::to_string(kg.selection.k) + "_" + kg_retrieval::ScorerName(kg.scorer);
}

// BLEU as is; ROUGE-L and BERTScore on the same 0-100 scale.
std::vector<std::string> MetricCells(const ExperimentResult &r) {
  return {Fixed(r.metrics.max_bleu->mean), Fixed(100.0 * r.metrics.rouge_l_f1->mean),
          Fixed(100.0 * r.metrics.bert_score_f1->mean)};
}

std::string Row(std::vector<std::string> cells, const std::vector<std::string> &more = {}) {
  cells.insert(cells.end(), more.begin(), more.end());
  return FormatDelimitedRow(cells) + "\n";
}

}  // namespace

std::string RunLabel(const ExperimentResult &result) {
  const std::string name = result.config.value("name", "");
  if (!name.empty()) return name;
  if (result.kind != "generator") return result.kind + "_" + result.config.value("dataset", "");
  const auto cfg = ParseConfig(result);
  if (!cfg) return result.config_hash;
  if (cfg->kg) return KgLabel(*cfg->kg);
  if (auto ablation = AblationLabel(*cfg); ablation && *ablation != "base") return *ablation;
  return generator::InfusionName(cfg->infusion);
}

ReportTables BuildReport(const std::vector<ExperimentResult> &results) {
  ReportTables t;
  t.main = Row({"run", "kind", "dataset", "infusion", "seed", "config_hash", "evaluated",
                "bleu", "rouge_l", "bert_score"});
  t.ablations = Row({"experiment", "dataset", "seed", "config_hash", "bleu", "rouge_l",
                     "bert_score"});
  t.knowledge = Row({"run", "dataset", "kg", "scorer", "selection", "k", "seed", "config_hash",
                     "bleu", "rouge_l", "bert_score"});

  // Comparable runs share dataset, seed and test subset.
  using Group = std::tuple<std::string, uint64_t, size_t>;
  std::map<Group, std::vector<std::pair<std::string, const ExperimentResult *>>> kg_runs;
  std::map<Group, std::pair<std::string, const ExperimentResult *>> plain_runs;

  for (const auto &r : results) {
    if (!HasReferenceMetrics(r)) {
      t.skipped.push_back(RunLabel(r));
      continue;
    }
    const std::string label = RunLabel(r);
    const auto cfg = ParseConfig(r);
    const std::string dataset = r.config.value("dataset", "");
    const std::string infusion =
        cfg ? generator::InfusionName(cfg->infusion) : r.kind;
    t.main += Row({label, r.kind, dataset, infusion, std::to_string(r.seed), r.config_hash,
                   std::to_string(r.metrics.evaluated)},
                  MetricCells(r));
    if (!cfg) continue;
    if (auto ablation = AblationLabel(*cfg)) {
      t.ablations += Row({*ablation, dataset, std::to_string(r.seed), r.config_hash},
                         MetricCells(r));
    }
    const Group group{cfg->dataset, cfg->seed, cfg->test_limit};
    if (cfg->kg) {
      const KgSpec &kg = *cfg->kg;
      t.knowledge += Row({label, dataset, kg.id, kg_retrieval::ScorerName(kg.scorer),
                          kg_retrieval::SelectionModeName(kg.selection.mode),
                          std::to_string(kg.selection.k), std::to_string(r.seed),
                          r.config_hash},
                         MetricCells(r));
      kg_runs[group].push_back({label, &r});
    } else if (cfg->infusion == generator::Infusion::kNone) {
      plain_runs.emplace(group, std::pair{label, &r});
    }
  }

  std::vector<analysis::NamedPairedTest> tests;
  auto compare = [&](const std::pair<std::string, const ExperimentResult *> &a,
                     const std::pair<std::string, const ExperimentResult *> &b) {
    for (const char *metric : {"max_bleu", "rouge_l_f1", "bert_score_f1"}) {
      const auto pairs = analysis::AlignMetric(a.second->metrics.samples,
                                               b.second->metrics.samples, metric);
      if (pairs.a.size() < 2) continue;
      tests.push_back({a.first, b.first, metric, analysis::PairedTTest(pairs.a, pairs.b)});
    }
  };
  for (const auto &[group, runs] : kg_runs) {
    for (size_t i = 0; i < runs.size(); ++i) {
      for (size_t j = i + 1; j < runs.size(); ++j) compare(runs[i], runs[j]);
    }
    if (auto plain = plain_runs.find(group); plain != plain_runs.end()) {
      for (const auto &run : runs) compare(run, plain->second);
    }
  }
  t.significance = analysis::PairedTestsCsv(tests);
  return t;
}

std::vector<fs::path> WriteReport(const ReportTables &tables, const fs::path &dir) {
  fs::create_directories(dir);
  const std::pair<const char *, const std::string *> files[] = {
      {"table2.csv", &tables.main},
      {"table4.csv", &tables.ablations},
      {"table6.csv", &tables.significance},
      {"table8.csv", &tables.knowledge}};
  std::vector<fs::path> out;
  for (const auto &[name, content] : files) {
    out.push_back(dir / name);
    WriteFileAtomic(out.back(), *content);
  }
  return out;
}

analysis::ScoreLists LoadRetrievalScores(const fs::path &cache_path, const std::string &scorer,
                                         const std::string &mode) {
  if (!fs::exists(cache_path)) {
    throw MissingArtifactError("retrieval cache " + cache_path.string() +
                               " not found; run `toxexplain kg-retrieve` first");
  }
  // Later lines win, as in the cache itself.
  std::map<std::string, std::vector<double>> latest;
  std::vector<std::string> order;
  for (const Json &row : ReadJsonLines(cache_path)) {
    const auto entry = kg_retrieval::CacheEntry::FromJson(row);
    if (!scorer.empty() && kg_retrieval::ScorerName(entry.key.scorer) != scorer) continue;
    if (!mode.empty() && kg_retrieval::SelectionModeName(entry.key.selection.mode) != mode) {
      continue;
    }
    const std::string key = entry.key.ToString();
    if (!latest.count(key)) order.push_back(key);
    latest[key] = entry.scores;
  }
  analysis::ScoreLists out;
  for (const auto &key : order) out.push_back(latest[key]);
  return out;
}

}  // namespace toxexplain::experiment
