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

// Command-line entry point. Every subcommand works on a workspace
// directory (default: the current directory).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "toxexplain/analysis/statistics.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/experiment/config.h"
#include "toxexplain/experiment/report.h"
#include "toxexplain/experiment/runner.h"
#include "toxexplain/experiment/workflow.h"
#include "toxexplain/experiment/zeroshot.h"

namespace fs = std::filesystem;
using namespace toxexplain;
using namespace toxexplain::experiment;

namespace {

corpus::TableFormat FormatFromExtension(const fs::path &path) {
  const std::string ext = ToLowerAscii(path.extension().string());
  if (ext == ".jsonl" || ext == ".json") return corpus::TableFormat::kJsonLines;
  if (ext == ".tsv") return corpus::TableFormat::kTsv;
  return corpus::TableFormat::kCsv;
}

// Reads a config file, letting --seed override the file's seed.
ExperimentConfig LoadConfig(const fs::path &path, std::optional<uint64_t> seed) {
  if (!fs::exists(path)) throw MissingArtifactError("config " + path.string() + " not found");
  Json j = ReadJson(path);
  if (seed) j["seed"] = *seed;
  return ExperimentConfig::FromJson(j);
}

void PrintMetrics(const ExperimentResult &r) {
  auto cell = [](const std::optional<evaluation::MetricSummary> &m, double scale) {
    return m ? fmt::format("{:.2f}", scale * m->mean) : std::string("-");
  };
  std::cout << fmt::format("{}  seed {}  evaluated {}  BLEU {}  ROUGE-L {}  BERTScore {}  "
                           "toxicity {}{}\n",
                           r.config_hash, r.seed, r.metrics.evaluated,
                           cell(r.metrics.max_bleu, 1.0), cell(r.metrics.rouge_l_f1, 100.0),
                           cell(r.metrics.bert_score_f1, 100.0), cell(r.metrics.toxicity, 1.0),
                           r.cache_hit ? "  (cached)" : "");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Implied-stereotype explanation toolkit"};
  app.require_subcommand(1);
  std::string workspace_dir = ".";
  std::string log_level = "info";
  app.add_option("-w,--workspace", workspace_dir, "Workspace directory")->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
      ->capture_default_str();

  // prepare
  auto *prepare = app.add_subcommand("prepare", "Load a raw explanation file into the workspace");
  std::string prep_id, prep_source = "sbic";
  fs::path prep_input, prep_schema;
  prepare->add_option("--id", prep_id, "Dataset id")->required();
  prepare->add_option("--input", prep_input, "Raw CSV, TSV or JSON-lines file")->required();
  prepare->add_option("--source", prep_source, "sbic or latent_hatred")->capture_default_str();
  prepare->add_option("--schema", prep_schema, "JSON column mapping");

  // train-regressor
  auto *train_reg = app.add_subcommand("train-regressor", "Train the toxicity regressor");
  std::string reg_name = "default";
  fs::path reg_input, reg_config, reg_schema;
  train_reg->add_option("--name", reg_name)->capture_default_str();
  train_reg->add_option("--input", reg_input, "Toxicity table")->required();
  train_reg->add_option("--config", reg_config, "Regressor settings (JSON)");
  train_reg->add_option("--schema", reg_schema, "JSON column mapping");

  // attr-infer
  auto *attr = app.add_subcommand("attr-infer", "Predict toxicity attributes for every post");
  std::string attr_dataset, attr_regressor = "default";
  attr->add_option("--dataset", attr_dataset)->required();
  attr->add_option("--regressor", attr_regressor)->capture_default_str();

  // kg-index
  auto *kg_index = app.add_subcommand("kg-index", "Index a knowledge graph");
  std::string kg_id;
  fs::path kg_input;
  bool kg_linearized = false;
  kg_index->add_option("--id", kg_id)->required();
  kg_index->add_option("--input", kg_input, "Tuple dump or ConceptNet assertions")->required();
  kg_index->add_flag("--linearized", kg_linearized, "One linearized tuple per line");

  // Subcommands driven by an experiment config.
  fs::path config_path;
  std::optional<uint64_t> seed;
  auto config_options = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", seed, "Override the config seed");
  };
  auto *kg_retrieve =
      app.add_subcommand("kg-retrieve", "Retrieve and cache tuples for a kg config");
  config_options(kg_retrieve);
  auto *train = app.add_subcommand("train", "Train a generator (cached)");
  config_options(train);
  auto *generate = app.add_subcommand("generate", "Generate for the test split (cached)");
  config_options(generate);
  auto *evaluate = app.add_subcommand("evaluate", "Train, generate and score; writes the result");
  config_options(evaluate);
  auto *ablate = app.add_subcommand("ablate", "Run a c1 base config and its ten ablations");
  config_options(ablate);

  // analyze
  auto *analyze = app.add_subcommand("analyze", "Significance tests and score distributions");
  std::vector<fs::path> analyze_results;
  fs::path analyze_cache, analyze_out;
  std::string analyze_scorer, analyze_mode;
  double analyze_threshold = 5.0;
  int analyze_k = 20;
  std::vector<double> analyze_edges;
  analyze->add_option("--results", analyze_results,
                      "Result files to compare pairwise on each metric");
  analyze->add_option("--retrieval", analyze_cache, "Retrieval cache to summarize");
  analyze->add_option("--scorer", analyze_scorer, "Restrict to idf_relevance or cosine");
  analyze->add_option("--mode", analyze_mode, "Restrict to top, bottom or random");
  analyze->add_option("--threshold", analyze_threshold, "Score threshold for the max-score share")
      ->capture_default_str();
  analyze->add_option("--k", analyze_k, "Scores per post for the uniqueness count")
      ->capture_default_str();
  analyze->add_option("--edges", analyze_edges, "Histogram bin edges");
  analyze->add_option("--out", analyze_out, "Output directory (default reports/analysis)");

  // zeroshot
  auto *zeroshot = app.add_subcommand("zeroshot", "Zero-shot chat model baseline");
  ZeroShotConfig zs;
  ChatClientConfig chat;
  zeroshot->add_option("--dataset", zs.dataset)->capture_default_str();
  zeroshot->add_option("--test-limit", zs.test_limit, "First N test posts (0: all)");
  zeroshot->add_option("--toxicity-scorer", zs.toxicity_scorer, "none or regressor")
      ->capture_default_str();
  zeroshot->add_option("--regressor", zs.regressor)->capture_default_str();
  zeroshot->add_option("--url", chat.url)->capture_default_str();
  zeroshot->add_option("--model", chat.model)->capture_default_str();
  zeroshot->add_option("--api-key-env", chat.api_key_env)->capture_default_str();
  zeroshot->add_option("--min-interval-ms", chat.min_interval_ms, "Request spacing")
      ->capture_default_str();
  zeroshot->add_option("--max-attempts", chat.max_attempts)->capture_default_str();

  // report
  auto *report = app.add_subcommand("report", "Write the four summary tables");
  fs::path report_results, report_out;
  report->add_option("--results", report_results, "Results directory (default results/)");
  report->add_option("--out", report_out, "Output directory (default reports/)");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  const Workspace ws{fs::path(workspace_dir)};

  try {
    if (*prepare) {
      corpus::ExplanationSchema schema =
          prep_schema.empty() ? corpus::ExplanationSchema::Default(
                                    corpus::ParseSourceDataset(prep_source))
                              : corpus::ExplanationSchema::FromJson(ReadJson(prep_schema));
      if (prep_schema.empty()) schema.format = FormatFromExtension(prep_input);
      const auto dataset = PrepareDataset(ws, prep_id, prep_input, schema);
      std::cout << dataset.ManifestJson().dump(2) << "\n";
    } else if (*train_reg) {
      const auto config = reg_config.empty()
                              ? tox_regressor::RegressorConfig{}
                              : tox_regressor::RegressorConfig::FromJson(ReadJson(reg_config));
      corpus::ToxicitySchema schema;
      if (reg_schema.empty()) {
        schema.format = FormatFromExtension(reg_input);
      } else {
        schema = corpus::ToxicitySchema::FromJson(ReadJson(reg_schema));
      }
      const auto log = TrainWorkspaceRegressor(ws, reg_name, reg_input, schema, config);
      std::cout << "best validation RMSE " << log.best_validation_rmse << " (epoch "
                << log.best_epoch << ")\n";
    } else if (*attr) {
      std::cout << InferAttributes(ws, attr_dataset, attr_regressor) << " posts scored\n";
    } else if (*kg_index) {
      const size_t n = BuildKnowledgeGraph(
          ws, kg_id, kg_input, kg_linearized ? TupleFormat::kLinearized : TupleFormat::kDump);
      std::cout << n << " tuples indexed\n";
    } else if (*kg_retrieve) {
      const auto config = LoadConfig(config_path, seed);
      if (!config.kg) throw PreconditionError("kg-retrieve needs a config with a kg block");
      for (auto split : {corpus::SplitName::kTrain, corpus::SplitName::kTest}) {
        const size_t n = PrepareExamples(ws, config, split).size();
        std::cout << corpus::SplitNameString(split) << ": " << n << " posts\n";
      }
    } else if (*train) {
      ExperimentRunner runner(ws);
      runner.Train(LoadConfig(config_path, seed));
      std::cout << (runner.trainings() ? "trained " : "cached ")
                << ws.RunDir(LoadConfig(config_path, seed)).string() << "\n";
    } else if (*generate) {
      ExperimentRunner runner(ws);
      const auto config = LoadConfig(config_path, seed);
      const size_t n = runner.Generate(config).size();
      std::cout << n << " generations in " << (ws.RunDir(config) / "generations.jsonl").string()
                << "\n";
    } else if (*evaluate) {
      ExperimentRunner runner(ws);
      const auto config = LoadConfig(config_path, seed);
      PrintMetrics(runner.Run(config));
      std::cout << ws.ResultPath(config).string() << "\n";
    } else if (*ablate) {
      ExperimentRunner runner(ws);
      const auto base = LoadConfig(config_path, seed);
      const auto grid = AblationGrid(base);
      const auto results = RunAblationSuite(runner, base);
      for (size_t i = 0; i < results.size(); ++i) {
        std::cout << (i == 0 ? std::string("base") : grid[i - 1].name) << "  ";
        PrintMetrics(results[i]);
      }
    } else if (*analyze) {
      if (analyze_results.empty() && analyze_cache.empty()) {
        throw PreconditionError("analyze needs --results files and/or a --retrieval cache");
      }
      const fs::path out = analyze_out.empty() ? ws.ReportsDir() / "analysis" : analyze_out;
      fs::create_directories(out);
      if (!analyze_results.empty()) {
        if (analyze_results.size() < 2) throw PreconditionError("--results needs two files");
        std::vector<ExperimentResult> results;
        for (const auto &p : analyze_results) results.push_back(ExperimentResult::Load(p));
        std::vector<analysis::NamedPairedTest> tests;
        for (size_t i = 0; i < results.size(); ++i) {
          for (size_t j = i + 1; j < results.size(); ++j) {
            for (const char *metric : {"max_bleu", "rouge_l_f1", "bert_score_f1", "toxicity"}) {
              const auto pairs = analysis::AlignMetric(results[i].metrics.samples,
                                                       results[j].metrics.samples, metric);
              if (pairs.a.size() < 2) continue;
              tests.push_back({RunLabel(results[i]), RunLabel(results[j]), metric,
                               analysis::PairedTTest(pairs.a, pairs.b)});
            }
          }
        }
        WriteFileAtomic(out / "paired_tests.csv", analysis::PairedTestsCsv(tests));
        std::cout << tests.size() << " paired tests -> " << (out / "paired_tests.csv").string()
                  << "\n";
      }
      if (!analyze_cache.empty()) {
        const auto scores = LoadRetrievalScores(analyze_cache, analyze_scorer, analyze_mode);
        const auto fixed = analysis::ScoreDistribution(
            scores, analysis::Binning::kFixedHalfOpen, analyze_edges);
        const auto tenths =
            analysis::ScoreDistribution(scores, analysis::Binning::kRoundNearestTenth);
        const auto unique = analysis::CountUniqueScores(scores, analyze_k);
        WriteFileAtomic(out / "score_histogram.csv", analysis::HistogramCsv(fixed));
        WriteFileAtomic(out / "score_tenths.csv", analysis::HistogramCsv(tenths));
        WriteFileAtomic(out / "score_uniqueness.csv", analysis::UniquenessCsv(unique));
        std::cout << fmt::format("{} posts; share with max score >= {}: {:.4f}; {} short of k\n",
                                 scores.size(), analyze_threshold,
                                 analysis::FractionWithMaxAtLeast(scores, analyze_threshold),
                                 unique.shortfall);
      }
    } else if (*zeroshot) {
      HttpChatClient client(chat);
      const auto result = RunZeroShotExperiment(ws, zs, client);
      PrintMetrics(result);
      std::cout << "missing answers: " << result.training.value("missing", 0) << "\n";
    } else if (*report) {
      const auto results =
          LoadResults(report_results.empty() ? ws.ResultsDir() : report_results);
      const auto tables = BuildReport(results);
      for (const auto &label : tables.skipped) {
        spdlog::warn("run {} has no reference metrics; left out of the tables", label);
      }
      for (const auto &f :
           WriteReport(tables, report_out.empty() ? ws.ReportsDir() : report_out)) {
        std::cout << f.string() << "\n";
      }
    }
  } catch (const MissingArtifactError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
