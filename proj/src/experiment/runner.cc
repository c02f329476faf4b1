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

#include "toxexplain/experiment/runner.h"

#include <chrono>
#include <set>

#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/embedding/encoder.h"
#include "toxexplain/evaluation/toxicity.h"
#include "toxexplain/kg_retrieval/retrieval.h"
#include "toxexplain/tox_regressor/regressor.h"

namespace toxexplain::experiment {

namespace fs = std::filesystem;
using attributes::AttributeString;
using attributes::ToxicityProbabilities;
using corpus::SplitName;
using generator::Infusion;

fs::path Workspace::DatasetDir(const std::string &dataset) const {
  return root_ / "data" / dataset;
}

fs::path Workspace::SplitPath(const std::string &dataset, SplitName split) const {
  return DatasetDir(dataset) / (corpus::SplitNameString(split) + ".jsonl");
}

fs::path Workspace::RegressorDir(const std::string &name) const {
  return root_ / "regressor" / name;
}

fs::path Workspace::AttributePath(const std::string &dataset, SplitName split) const {
  return root_ / "attributes" / dataset / (corpus::SplitNameString(split) + ".jsonl");
}

fs::path Workspace::KgDir(const std::string &kg) const { return root_ / "kg" / kg; }
fs::path Workspace::KgIndexDir(const std::string &kg) const { return KgDir(kg) / "index"; }
fs::path Workspace::KgTuplesPath(const std::string &kg) const { return KgDir(kg) / "tuples.txt"; }

fs::path Workspace::KgCachePath(const std::string &kg, const std::string &dataset) const {
  return KgDir(kg) / "retrieval" / (dataset + ".jsonl");
}

fs::path Workspace::RunDir(const ExperimentConfig &config) const {
  return root_ / "runs" / (config.Hash() + "-seed" + std::to_string(config.seed));
}

fs::path Workspace::ResultsDir() const { return root_ / "results"; }

fs::path Workspace::ResultPath(const ExperimentConfig &config) const {
  const fs::path dir = config.output_dir.empty() ? ResultsDir() : fs::path(config.output_dir);
  return dir / (config.Hash() + "-seed" + std::to_string(config.seed) + ".json");
}

fs::path Workspace::ReportsDir() const { return root_ / "reports"; }

corpus::ExplanationSplit Workspace::ReadDatasetSplit(const std::string &dataset,
                                                     SplitName split) const {
  const fs::path path = SplitPath(dataset, split);
  if (!fs::exists(path)) {
    throw MissingArtifactError("dataset split " + path.string() +
                               " not found; run `toxexplain prepare --id " + dataset +
                               "` first");
  }
  return corpus::ReadSplit(path, split);
}

void WriteAttributeFile(const fs::path &path,
                        const std::map<std::string, ToxicityProbabilities> &probs,
                        const std::string &checkpoint_id) {
  std::vector<Json> rows;
  rows.reserve(probs.size());
  for (const auto &[id, p] : probs) {
    rows.push_back(Json{{"post_id", id}, {"probabilities", p}, {"regressor", checkpoint_id}});
  }
  fs::create_directories(path.parent_path());
  WriteJsonLinesAtomic(path, rows);
}

std::map<std::string, ToxicityProbabilities> ReadAttributeFile(const fs::path &path) {
  if (!fs::exists(path)) {
    throw MissingArtifactError("attribute file " + path.string() +
                               " not found; run `toxexplain attr-infer` first");
  }
  std::map<std::string, ToxicityProbabilities> out;
  for (const Json &row : ReadJsonLines(path)) {
    const auto values = row.at("probabilities").get<std::vector<double>>();
    if (values.size() != attributes::kNumLabels) {
      throw LoadError(path.string() + ": expected 6 probabilities for post " +
                      row.at("post_id").get<std::string>());
    }
    ToxicityProbabilities p{};
    std::copy(values.begin(), values.end(), p.begin());
    out[row.at("post_id").get<std::string>()] = p;
  }
  return out;
}

ToxicityProbabilities ProbabilitiesFor(const ExperimentConfig &config,
                                       const std::string &post_id,
                                       const ToxicityProbabilities &regressor_probs) {
  if (config.attribute_source != AttributeSource::kPerturbed) return regressor_probs;
  std::optional<uint64_t> seed;
  if (config.perturb == attributes::PerturbMode::kRandom) {
    seed = MixSeed(config.seed, Fnv1a64(post_id));
  }
  return attributes::PerturbProbabilities(config.perturb, seed);
}

AttributeString AttributeStringFor(const ExperimentConfig &config, const std::string &post_id,
                                   const ToxicityProbabilities &probs) {
  // Decide in token form, flip there, render last.
  attributes::AttributeConfig tokens_only = config.attributes;
  tokens_only.rendering = attributes::Rendering::kSpecialTokens;
  AttributeString s =
      attributes::ThresholdedTokens(ProbabilitiesFor(config, post_id, probs), tokens_only);
  if (config.attribute_source == AttributeSource::kFlipped) {
    s = attributes::FlipAttribute(s, config.flip_label);
  }
  if (config.attributes.rendering == attributes::Rendering::kPlainPrompt) {
    s = attributes::TokensToPrompt(s);
  }
  return s;
}

namespace {

std::vector<corpus::ExplanationRecord> Limited(std::vector<corpus::ExplanationRecord> records,
                                               size_t limit) {
  if (limit > 0 && records.size() > limit) records.resize(limit);
  return records;
}

// KG-augmented sources for the given posts, filling the retrieval cache
// for any post not seen before.
std::map<std::string, std::string> KgSources(const Workspace &workspace,
                                             const ExperimentConfig &config,
                                             const std::vector<corpus::ExplanationRecord> &records) {
  const KgSpec &spec = *config.kg;
  const fs::path index_dir = workspace.KgIndexDir(spec.id);
  const auto index = kg_retrieval::KnowledgeIndex::Load(index_dir);

  kg_retrieval::RetrievalSelection selection = spec.selection;
  if (selection.mode == kg_retrieval::SelectionMode::kRandom && !selection.seed) {
    selection.seed = config.seed;
  }
  const fs::path cache_path = workspace.KgCachePath(spec.id, config.dataset);
  fs::create_directories(cache_path.parent_path());
  kg_retrieval::RetrievalCache cache(cache_path);

  // Built only when some post misses the cache.
  std::optional<kg_retrieval::IdfTable> idf;
  std::unique_ptr<embedding::TextEncoder> encoder;
  std::optional<kg_retrieval::EmbeddedTuples> embedded;
  const kg_retrieval::QueryExtractor extractor(index.lemmatizer(), {});

  std::map<std::string, std::string> sources;
  for (const auto &record : records) {
    kg_retrieval::CacheKey key{record.post.id, index.id(), spec.scorer, selection};
    const kg_retrieval::CacheEntry *hit = cache.Find(key);
    kg_retrieval::CacheEntry entry;
    if (hit) {
      entry = *hit;
    } else {
      std::vector<kg_retrieval::ScoredTuple> ranking;
      if (spec.scorer == kg_retrieval::Scorer::kIdfRelevance) {
        if (!idf) {
          std::vector<std::string> posts;
          for (SplitName s : {SplitName::kTrain, SplitName::kTest, SplitName::kValidation}) {
            if (!fs::exists(workspace.SplitPath(config.dataset, s))) continue;
            for (const auto &r : workspace.ReadDatasetSplit(config.dataset, s).records) {
              posts.push_back(r.post.text);
            }
          }
          idf = kg_retrieval::ComputeIdf(posts, extractor);
        }
        ranking = kg_retrieval::RetrieveByRelevance(
            kg_retrieval::MakeQuery(record.post.text, extractor, *idf), index);
      } else {
        if (!embedded) {
          encoder = embedding::MakeEncoder(spec.encoder);
          embedded.emplace(index.tuples(), *encoder);
        }
        ranking = kg_retrieval::RetrieveBySimilarity(record.post.text, *embedded, *encoder);
      }
      const auto selected = kg_retrieval::SelectK(std::move(ranking), selection);
      entry.key = key;
      entry.shortfall = selected.shortfall;
      for (const auto &t : selected.tuples) {
        entry.tuples.push_back(t.tuple.linearized);
        entry.scores.push_back(t.score);
      }
      cache.Append(entry);
    }
    sources[record.post.id] =
        kg_retrieval::BuildKgInput(record.post.text, entry.tuples,
                                   static_cast<size_t>(config.model.max_source_tokens - 1));
  }
  return sources;
}

}  // namespace

std::vector<PreparedExample> PrepareExamples(const Workspace &workspace,
                                             const ExperimentConfig &config,
                                             SplitName split) {
  const size_t limit = split == SplitName::kTrain ? config.train_limit : config.test_limit;
  const auto records = Limited(workspace.ReadDatasetSplit(config.dataset, split).records, limit);

  std::map<std::string, ToxicityProbabilities> regressor_probs;
  if (config.NeedsRegressorProbabilities()) {
    regressor_probs = ReadAttributeFile(workspace.AttributePath(config.dataset, split));
  }
  std::map<std::string, std::string> kg_sources;
  if (config.infusion == Infusion::kKg) kg_sources = KgSources(workspace, config, records);

  std::vector<PreparedExample> out;
  out.reserve(records.size());
  for (const auto &record : records) {
    PreparedExample ex;
    ex.post_id = record.post.id;
    ex.post = record.post.text;
    ex.references = record.references.references;
    ToxicityProbabilities probs{};
    if (config.NeedsRegressorProbabilities()) {
      auto it = regressor_probs.find(record.post.id);
      if (it == regressor_probs.end()) {
        throw MissingArtifactError("no regressor probabilities for post " + record.post.id +
                                   "; rerun `toxexplain attr-infer`");
      }
      probs = it->second;
    }
    switch (config.infusion) {
      case Infusion::kNone:
        ex.input.source = record.post.text;
        break;
      case Infusion::kKg:
        ex.input.source = kg_sources.at(record.post.id);
        break;
      case Infusion::kC1:
        ex.input.source = generator::BuildInputC1(
            record.post.text, AttributeStringFor(config, record.post.id, probs),
            config.post_first);
        break;
      case Infusion::kC2:
        ex.input.source = generator::BuildInputC2(
            record.post.text, attributes::InDatasetString(record.attributes),
            config.post_first);
        break;
      case Infusion::kC3:
        ex.input.source = record.post.text;
        ex.input.probabilities = ProbabilitiesFor(config, record.post.id, probs);
        break;
      case Infusion::kC4:
      case Infusion::kC5:
        ex.input.source = record.post.text;
        ex.input.attributes = AttributeStringFor(config, record.post.id, probs).text;
        break;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

Json EnvironmentFingerprint() {
  Json j;
#if defined(__clang__)
  j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  j["compiler"] = std::string("gcc ") + __VERSION__;
#else
  j["compiler"] = "unknown";
#endif
#if defined(__linux__)
  j["platform"] = "linux";
#elif defined(__APPLE__)
  j["platform"] = "darwin";
#else
  j["platform"] = "other";
#endif
  j["cxx_standard"] = static_cast<long>(__cplusplus);
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
#ifdef NDEBUG
  j["build"] = "release";
#else
  j["build"] = "debug";
#endif
  j["pointer_bits"] = sizeof(void *) * 8;
  return j;
}

Json ExperimentResult::ToJson() const {
  return Json{{"kind", kind},
              {"config_hash", config_hash},
              {"seed", seed},
              {"config", config},
              {"metrics", metrics.ToJson()},
              {"wall_clock_seconds", wall_clock_seconds},
              {"environment", environment},
              {"training", training}};
}

ExperimentResult ExperimentResult::FromJson(const Json &j) {
  ExperimentResult r;
  r.kind = j.value("kind", "generator");
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<uint64_t>();
  r.config = j.value("config", Json::object());
  r.metrics = evaluation::MetricReport::FromJson(j.at("metrics"));
  r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
  r.environment = j.value("environment", Json::object());
  r.training = j.value("training", Json::object());
  return r;
}

ExperimentResult ExperimentResult::Load(const fs::path &path) {
  try {
    return FromJson(ReadJson(path));
  } catch (const Json::exception &e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::vector<ExperimentResult> LoadResults(const fs::path &dir) {
  if (!fs::is_directory(dir)) {
    throw MissingArtifactError("results directory " + dir.string() +
                               " not found; run experiments first");
  }
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ExperimentResult> out;
  for (const auto &f : files) out.push_back(ExperimentResult::Load(f));
  return out;
}

ExperimentConfig Seeded(const ExperimentConfig &config) {
  ExperimentConfig c = config;
  c.model.seed = c.seed;
  c.model.infusion = c.infusion;
  c.trainer.seed = c.seed;
  return c;
}

ExperimentRunner::ExperimentRunner(Workspace workspace) : workspace_(std::move(workspace)) {}

std::unique_ptr<generator::Seq2SeqModel> ExperimentRunner::Train(const ExperimentConfig &config) {
  const ExperimentConfig cfg = Seeded(config);
  cfg.Validate();
  const fs::path run_dir = workspace_.RunDir(cfg);
  const fs::path model_dir = run_dir / "model";
  if (fs::exists(model_dir / "done")) {
    spdlog::info("model cache hit for {}", run_dir.filename().string());
    return generator::Seq2SeqModel::Load(model_dir);
  }
  std::vector<generator::TrainingPair> pairs;
  for (auto &ex : PrepareExamples(workspace_, cfg, SplitName::kTrain)) {
    for (const auto &ref : ex.references) {
      if (Trim(ref).empty()) continue;
      pairs.push_back({ex.post_id, ex.input, ref});
    }
  }
  if (pairs.empty()) throw PreconditionError("no training pairs for " + cfg.dataset);
  spdlog::info("training {} on {} pairs", run_dir.filename().string(), pairs.size());
  generator::GeneratorTrainLog log;
  auto model = generator::TrainGenerator(pairs, cfg.model, cfg.trainer, &log);
  ++trainings_;
  fs::create_directories(run_dir);
  model->Save(model_dir);
  Json train_log = log.ToJson();
  train_log["vocabulary"] = model->vocab().size();
  WriteJsonAtomic(run_dir / "train_log.json", train_log);
  WriteJsonAtomic(run_dir / "config.json", cfg.ToJson());
  // Marker written last so a crash mid-save never looks like a cache hit.
  WriteFileAtomic(model_dir / "done", "");
  return model;
}

std::vector<generator::GeneratedExplanation> ExperimentRunner::Generate(
    const ExperimentConfig &config) {
  const ExperimentConfig cfg = Seeded(config);
  const fs::path path = workspace_.RunDir(cfg) / "generations.jsonl";
  std::vector<generator::GeneratedExplanation> out;
  if (fs::exists(path)) {
    for (const Json &row : ReadJsonLines(path)) {
      out.push_back(generator::GeneratedExplanation::FromJson(row));
    }
    return out;
  }
  auto model = Train(cfg);
  std::vector<generator::GenerationRequest> requests;
  for (auto &ex : PrepareExamples(workspace_, cfg, SplitName::kTest)) {
    requests.push_back({ex.post_id, std::move(ex.input)});
  }
  out = generator::Generate(*model, requests, cfg.decode, cfg.Hash(), cfg.seed);
  std::vector<Json> rows;
  for (const auto &g : out) rows.push_back(g.ToJson());
  WriteJsonLinesAtomic(path, rows);
  return out;
}

evaluation::MetricReport EvaluateGenerations(
    const Workspace &workspace, const std::string &dataset, size_t test_limit,
    const std::string &toxicity_scorer, const std::string &regressor_name,
    const std::vector<generator::GeneratedExplanation> &generations) {
  const auto test =
      Limited(workspace.ReadDatasetSplit(dataset, SplitName::kTest).records, test_limit);
  std::map<std::string, const corpus::ExplanationRecord *> by_id;
  for (const auto &r : test) by_id[r.post.id] = &r;

  std::vector<evaluation::EvaluationItem> items;
  items.reserve(generations.size());
  for (const auto &g : generations) {
    auto it = by_id.find(g.post_id);
    if (it == by_id.end()) {
      throw PreconditionError("generation for unknown test post " + g.post_id);
    }
    items.push_back({g.post_id, g.text, it->second->references.references});
  }

  embedding::HashedNgramEncoder encoder(512);
  evaluation::EvaluationOptions options;
  options.bert_encoder = &encoder;
  std::unique_ptr<tox_regressor::ToxicityRegressor> regressor;
  std::unique_ptr<evaluation::RegressorToxicityScorer> scorer;
  if (toxicity_scorer == "regressor") {
    const fs::path dir = workspace.RegressorDir(regressor_name);
    if (!fs::exists(dir)) {
      throw MissingArtifactError("regressor " + dir.string() +
                                 " not found; run `toxexplain train-regressor` first");
    }
    regressor = tox_regressor::ToxicityRegressor::Load(dir);
    scorer = std::make_unique<evaluation::RegressorToxicityScorer>(*regressor);
    options.toxicity = scorer.get();
  }
  return evaluation::Evaluate(items, options);
}

evaluation::MetricReport ExperimentRunner::Evaluate(
    const ExperimentConfig &config,
    const std::vector<generator::GeneratedExplanation> &generations) const {
  return EvaluateGenerations(workspace_, config.dataset, config.test_limit,
                             config.toxicity_scorer, config.regressor, generations);
}

ExperimentResult ExperimentRunner::Run(const ExperimentConfig &config) {
  const ExperimentConfig cfg = Seeded(config);
  cfg.Validate();
  const fs::path result_path = workspace_.ResultPath(cfg);
  if (fs::exists(result_path)) {
    spdlog::info("result cache hit: {}", result_path.string());
    ExperimentResult cached = ExperimentResult::Load(result_path);
    cached.cache_hit = true;
    return cached;
  }
  const auto start = std::chrono::steady_clock::now();
  const auto generations = Generate(cfg);
  ExperimentResult result;
  result.config_hash = cfg.Hash();
  result.seed = cfg.seed;
  result.config = cfg.ToJson();
  result.metrics = Evaluate(cfg, generations);
  result.environment = EnvironmentFingerprint();
  const fs::path train_log = workspace_.RunDir(cfg) / "train_log.json";
  if (fs::exists(train_log)) {
    Json log = ReadJson(train_log);
    result.training = Json{{"pairs", log.value("pairs", 0)},
                           {"vocabulary", log.value("vocabulary", 0)},
                           {"epoch_losses", log.value("epoch_losses", Json::array())}};
  }
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::create_directories(result_path.parent_path());
  WriteJsonAtomic(result_path, result.ToJson());
  return result;
}

namespace {

std::string LambdaName(double lambda) {
  std::string s = fmt::format("{:.2f}", lambda);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::vector<AblationVariant> AblationGrid(const ExperimentConfig &base) {
  if (base.infusion != Infusion::kC1 || base.attribute_source != AttributeSource::kRegressor) {
    throw PreconditionError("the ablation suite starts from a c1 config with regressor "
                            "attributes");
  }
  std::vector<AblationVariant> grid;
  auto add = [&](std::string name, auto &&edit) {
    ExperimentConfig c = base;
    edit(c);
    c.name = name;
    c.Validate();
    grid.push_back({std::move(name), std::move(c)});
  };
  add("exp1_plain_prompt",
      [](ExperimentConfig &c) { c.attributes.rendering = attributes::Rendering::kPlainPrompt; });
  for (auto [tag, lambda] : {std::pair{"exp2", 0.3}, std::pair{"exp3", 0.6}}) {
    add(std::string(tag) + "_lambda_" + LambdaName(lambda),
        [lambda = lambda](ExperimentConfig &c) { c.attributes.lambda = lambda; });
  }
  const std::pair<const char *, attributes::PerturbMode> perturbs[] = {
      {"exp4a", attributes::PerturbMode::kAllZeros},
      {"exp4b", attributes::PerturbMode::kAllOnes},
      {"exp4c", attributes::PerturbMode::kRandom}};
  for (const auto &[tag, mode] : perturbs) {
    add(std::string(tag) + "_" + attributes::PerturbModeName(mode),
        [mode = mode](ExperimentConfig &c) {
          c.attribute_source = AttributeSource::kPerturbed;
          c.perturb = mode;
        });
  }
  const std::pair<const char *, attributes::ToxicityLabel> flips[] = {
      {"exp5a", attributes::ToxicityLabel::kToxicity},
      {"exp5b", attributes::ToxicityLabel::kSevereToxicity},
      {"exp5c", attributes::ToxicityLabel::kObscene},
      {"exp5d", attributes::ToxicityLabel::kThreat}};
  for (const auto &[tag, label] : flips) {
    add(std::string(tag) + "_flip_" + attributes::LabelName(label),
        [label = label](ExperimentConfig &c) {
          c.attribute_source = AttributeSource::kFlipped;
          c.flip_label = label;
        });
  }
  return grid;
}

std::optional<std::string> AblationLabel(const ExperimentConfig &config) {
  if (config.infusion != Infusion::kC1) return std::nullopt;
  ExperimentConfig base = config;
  base.attribute_source = AttributeSource::kRegressor;
  base.attributes = attributes::AttributeConfig{};
  const std::string base_hash = base.Hash();
  if (config.Hash() == base_hash) return "base";
  try {
    for (const auto &v : AblationGrid(base)) {
      if (v.config.Hash() == config.Hash()) return v.name;
    }
  } catch (const PreconditionError &) {
  }
  return std::nullopt;
}

std::vector<ExperimentResult> RunAblationSuite(ExperimentRunner &runner,
                                               const ExperimentConfig &base) {
  const auto grid = AblationGrid(base);
  std::vector<ExperimentResult> out;
  out.push_back(runner.Run(base));
  for (const auto &v : grid) out.push_back(runner.Run(v.config));
  return out;
}

}  // namespace toxexplain::experiment
