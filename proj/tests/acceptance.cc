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

// Acceptance runner: one line per criterion. Criteria 1-8 run on synthetic
// data and must pass; 9-12 need the real corpora and are skipped unless the
// corresponding environment variables point at them.

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracle_attributes.h"
#include "oracle_coda.h"
#include "oracle_regressor.h"
#include "oracle_retrieval.h"
#include "oracle_stats.h"
#include "gradcheck.h"
#include "toxexplain/analysis/statistics.h"
#include "toxexplain/attributes/attributes.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"
#include "toxexplain/embedding/encoder.h"
#include "toxexplain/evaluation/metrics.h"
#include "toxexplain/experiment/report.h"
#include "toxexplain/experiment/runner.h"
#include "toxexplain/experiment/workflow.h"
#include "toxexplain/generator/coda.h"
#include "toxexplain/generator/decode.h"
#include "toxexplain/generator/trainer.h"
#include "toxexplain/kg_retrieval/query.h"
#include "toxexplain/kg_retrieval/retrieval.h"
#include "toxexplain/synth/synth.h"
#include "toxexplain/tox_regressor/regressor.h"

namespace fs = std::filesystem;
using namespace toxexplain;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

// Collects failures inside a criterion without stopping at the first one.
class Checks {
 public:
  void Expect(bool ok, const std::string &what) {
    ++total_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  size_t failed() const { return failed_; }
  size_t total() const { return total_; }
  Outcome Result(const std::string &summary) const {
    if (failed_ == 0) return {Status::kPass, summary};
    std::string detail = summary + "; " + std::to_string(failed_) + "/" +
                         std::to_string(total_) + " checks failed: " + Join(failures_, " | ");
    return {Status::kFail, detail};
  }

 private:
  size_t total_ = 0;
  size_t failed_ = 0;
  std::vector<std::string> failures_;
};

fs::path WorkDir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("toxexplain_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Fmt(double v, int digits = 4) { return fmt::format("{:.{}f}", v, digits); }

// ---- 1: attribute thresholding ---------------------------------------------

Outcome Thresholding() {
  using attributes::ToxicityProbabilities;
  Checks c;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  size_t monotone_checked = 0;
  for (double lambda : {0.3, 0.5, 0.6}) {
    attributes::AttributeConfig config;
    config.lambda = lambda;
    for (int i = 0; i < 10000; ++i) {
      ToxicityProbabilities p{};
      for (double &v : p) v = u(rng);
      // Every fourth draw lands exactly on the threshold in one slot.
      if (i % 4 == 0) p[i % 6] = lambda;
      const auto s = attributes::ThresholdedTokens(p, config);
      c.Expect(s.text == testing::OracleTokens(p, lambda), "oracle mismatch");
      // Raising one probability never removes a positive token.
      ToxicityProbabilities q = p;
      const size_t slot = static_cast<size_t>(rng() % 6);
      q[slot] = std::min(1.0, q[slot] + u(rng));
      c.Expect(attributes::CountPositiveTokens(attributes::ThresholdedTokens(q, config)) >=
                   attributes::CountPositiveTokens(s),
               "monotonicity");
      ++monotone_checked;
      for (auto label : attributes::LabelOrder()) {
        const auto once = attributes::FlipAttribute(s, label);
        c.Expect(once.text != s.text, "flip changed nothing");
        c.Expect(attributes::FlipAttribute(once, label).text == s.text, "flip involution");
      }
    }
  }
  return c.Result(fmt::format("30000 vectors, {} monotonicity and {} flip checks", monotone_checked,
                              monotone_checked * 6));
}

// ---- 2: knowledge-graph rankings -------------------------------------------

std::vector<std::string> SynthPosts(size_t count, uint64_t seed) {
  synth::ExplanationCorpusOptions opts;
  opts.train_posts = count;
  opts.test_posts = 0;
  opts.seed = seed;
  const auto ds = corpus::ParseExplanationDataset(
      synth::MakeExplanationTable(opts),
      corpus::ExplanationSchema::Default(corpus::SourceDataset::kSbicLike));
  std::vector<std::string> out;
  for (const auto &r : ds.train.records) out.push_back(r.post.text);
  return out;
}

Outcome KnowledgeRankings() {
  using namespace kg_retrieval;
  Checks c;
  const fs::path dir = WorkDir("kg");
  WriteFileAtomic(dir / "kg.tsv", synth::MakeConceptNetStyleTsv({100, 5}));
  const auto tuples = LoadTupleDump(dir / "kg.tsv");
  c.Expect(tuples.size() == 100, "tuple count");
  const auto index = KnowledgeIndex::Build(tuples);
  const auto posts = SynthPosts(20, 2);
  c.Expect(posts.size() == 20, "post count");
  const QueryExtractor extractor(index.lemmatizer(), ContentWordTagger());
  const IdfTable idf = ComputeIdf(posts, extractor);

  auto stereo_lines = synth::MakeStereoTuples({100, 5});
  stereo_lines.resize(std::min<size_t>(stereo_lines.size(), 100));
  embedding::HashedNgramEncoder encoder(512);
  const EmbeddedTuples stereo(ParseLinearizedTuples(stereo_lines), encoder);

  size_t relevance_ranked = 0;
  for (size_t i = 0; i < posts.size(); ++i) {
    const auto q = MakeQuery(posts[i], extractor, idf);
    const auto ranked = RetrieveByRelevance(q, index);
    const auto oracle = testing::BruteForceRelevance(tuples, q, index.lemmatizer());
    c.Expect(ranked.size() == oracle.size(), "relevance size");
    for (size_t r = 0; r < std::min(ranked.size(), oracle.size()); ++r) {
      c.Expect(ranked[r].tuple.id == oracle[r].first && ranked[r].score == oracle[r].second,
               "relevance order");
    }
    relevance_ranked += ranked.size();

    // Cosine by explicit loops, stable-sorted by score.
    const auto sim = RetrieveBySimilarity(posts[i], stereo, encoder);
    const embedding::Vector p = encoder.EmbedSentence(posts[i]);
    std::vector<std::pair<uint32_t, double>> cos;
    for (const auto &t : stereo.tuples()) {
      const embedding::Vector v = encoder.EmbedSentence(t.linearized);
      double dot = 0, np = 0, nv = 0;
      for (int d = 0; d < p.size(); ++d) {
        dot += p[d] * v[d];
        np += p[d] * p[d];
        nv += v[d] * v[d];
      }
      cos.emplace_back(t.id, (np == 0 || nv == 0) ? 0.0 : dot / std::sqrt(np * nv));
    }
    std::stable_sort(cos.begin(), cos.end(),
                     [](const auto &a, const auto &b) { return a.second > b.second + 1e-12; });
    c.Expect(sim.size() == cos.size(), "similarity size");
    for (size_t r = 0; r < std::min(sim.size(), cos.size()); ++r) {
      c.Expect(std::abs(sim[r].score - cos[r].second) <= 1e-12, "similarity score");
      if (r > 0) c.Expect(sim[r - 1].score >= sim[r].score, "similarity order");
    }

    for (const auto *ranking : {&ranked, &sim}) {
      const int k = 20;
      if (ranking->size() >= 2 * static_cast<size_t>(k)) {
        std::set<uint32_t> top;
        for (const auto &t : SelectK(*ranking, {SelectionMode::kTop, k, {}}).tuples) {
          top.insert(t.tuple.id);
        }
        for (const auto &t : SelectK(*ranking, {SelectionMode::kBottom, k, {}}).tuples) {
          c.Expect(top.count(t.tuple.id) == 0, "top/bottom overlap");
        }
      }
      for (uint64_t seed : {1ull, 7ull, 2026ull}) {
        const auto a = SelectK(*ranking, {SelectionMode::kRandom, k, seed});
        const auto b = SelectK(*ranking, {SelectionMode::kRandom, k, seed});
        c.Expect(a.tuples.size() == b.tuples.size(), "random size");
        for (size_t r = 0; r < std::min(a.tuples.size(), b.tuples.size()); ++r) {
          c.Expect(a.tuples[r].tuple.id == b.tuples[r].tuple.id, "random determinism");
        }
      }
    }
  }
  c.Expect(relevance_ranked > 0, "no relevance hits at all");
  return c.Result(fmt::format("20 posts; {} relevance-ranked tuples; 100 stereotype tuples "
                              "per post by cosine",
                              relevance_ranked));
}

// ---- 3: metric oracles ------------------------------------------------------

Outcome MetricOracles() {
  using Tokens = std::vector<std::string>;
  Checks c;
  std::mt19937_64 rng(303);
  const Tokens pool = {"they", "are", "lazy", "glorbians", "steal", "jobs", "money",
                       "always", "people", "dirty", "bad"};
  auto sentence = [&](size_t n) {
    Tokens t(n);
    for (auto &w : t) w = pool[rng() % pool.size()];
    return t;
  };
  // 50-pair fixture of strings up to 10 tokens.
  std::vector<std::pair<Tokens, Tokens>> fixture;
  for (int i = 0; i < 50; ++i) fixture.emplace_back(sentence(1 + rng() % 10), sentence(1 + rng() % 10));
  size_t pairs = 0;
  for (const auto &[a, b] : fixture) {
    c.Expect(*evaluation::MaxBleu(Join(a, " "), {Join(a, " ")}) == 100.0, "bleu identity");
    for (const auto &[x, y] : std::vector<std::pair<Tokens, Tokens>>{{a, b}, {b, a}}) {
      const size_t lcs = testing::SubsetLcs(x, y);
      c.Expect(evaluation::LcsLength(x, y) == lcs, "lcs");
      const double p = double(lcs) / x.size(), r = double(lcs) / y.size();
      const double f1 = lcs == 0 ? 0.0 : 2 * p * r / (p + r);
      c.Expect(std::abs(evaluation::RougeLF1(x, y) - f1) < 1e-12, "rouge-l f1");
      ++pairs;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const std::string hyp = Join(sentence(1 + rng() % 12), " ");
    std::vector<std::string> refs;
    for (size_t r = 0, n = 1 + rng() % 4; r < n; ++r) refs.push_back(Join(sentence(1 + rng() % 12), " "));
    const double without = *evaluation::MaxBleu(hyp, refs);
    refs.insert(refs.begin() + static_cast<long>(rng() % (refs.size() + 1)), hyp);
    c.Expect(*evaluation::MaxBleu(hyp, refs) == 100.0, "max over references");
    c.Expect(without <= 100.0 && without >= 0.0, "bleu range");
  }
  return c.Result(fmt::format("{} LCS pairs vs brute force, 1000 max-over-reference cases",
                              pairs));
}

// ---- 4: paired t-test -------------------------------------------------------

Outcome Statistics() {
  Checks c;
  double worst_t = 0.0, worst_p = 0.0;
  for (const auto &f : testing::TTestFixtures()) {
    const auto r = analysis::PairedTTest(f.a, f.b);
    worst_t = std::max(worst_t, std::abs(r.t - f.t));
    worst_p = std::max(worst_p, std::abs(r.p - f.p));
    c.Expect(std::abs(r.t - f.t) <= 1e-6 && std::abs(r.p - f.p) <= 1e-6, "fixture");
    const auto back = analysis::PairedTTest(f.b, f.a);
    c.Expect(std::abs(back.t + r.t) <= 1e-12 * std::max(1.0, std::abs(r.t)), "antisymmetry t");
    c.Expect(std::abs(back.p - r.p) <= 1e-12, "antisymmetry p");
    for (double shift : {-17.5, 3.25, 1000.0}) {
      auto a = f.a, b = f.b;
      for (double &v : a) v += shift;
      for (double &v : b) v += shift;
      const auto s = analysis::PairedTTest(a, b);
      c.Expect(std::abs(s.t - r.t) <= 1e-6 * std::max(1.0, std::abs(r.t)) &&
                   std::abs(s.p - r.p) <= 1e-9,
               "shift invariance");
    }
  }
  return c.Result(fmt::format("{} fixtures; max |dt| {:.2e}, max |dp| {:.2e}",
                              testing::TTestFixtures().size(), worst_t, worst_p));
}

// ---- 5: de-attention numerics -----------------------------------------------

Outcome CodaNumerics() {
  using generator::Infusion;
  using nn::Matrix;
  Checks c;
  nn::Graph g(false);
  const Matrix two = Matrix::Constant(1, 1, 2.0);
  const double psi = g.Scalar(generator::CodaAttention(
      g, g.Constant(two), g.Constant(two), g.Constant(two), generator::NegativeL1Affinity(1.0)));
  const double hand = std::tanh(4.0) * (1.0 / (1.0 + std::exp(0.0))) * 2.0;
  c.Expect(std::abs(psi - hand) <= 1e-4, "hand case");

  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng), m = dim(rng), dk = dim(rng), dv = dim(rng);
    Matrix q(n, dk), k(m, dk), v(m, dv);
    for (Matrix *x : {&q, &k, &v}) {
      for (Eigen::Index i = 0; i < x->size(); ++i) x->data()[i] = normal(rng);
    }
    nn::Graph h(false);
    const Matrix out = h.value(generator::CodaAttention(h, h.Constant(q), h.Constant(k),
                                                        h.Constant(v),
                                                        generator::NegativeL1Affinity(1.0)));
    c.Expect((out - testing::PsiOracle(q, k, v, 1.0)).cwiseAbs().maxCoeff() < 1e-12, "oracle");
    const Eigen::RowVectorXd bound = v.cwiseAbs().colwise().sum();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dv; ++j) c.Expect(std::abs(out(i, j)) <= bound(j) + 1e-12, "bound");
    }
  }

  // Finite differences over every parameter of a tiny model, 2-sample batch.
  const auto vocab = nn::Vocabulary::Build(
      {"why are they always late", "they are lazy", "toxic not severely"},
      generator::GeneratorSpecialTokens());
  std::string worst;
  for (Infusion infusion : {Infusion::kC3, Infusion::kC4, Infusion::kC5}) {
    generator::ModelConfig config;
    config.dim = 8;
    config.heads = 2;
    config.ffn = 16;
    config.encoder_layers = 1;
    config.decoder_layers = 1;
    config.max_positions = 16;
    config.max_source_tokens = 12;
    config.dropout = 0.0;
    config.infusion = infusion;
    config.seed = 3;
    generator::Seq2SeqModel model(vocab, config);
    const std::string ta = "they are lazy", tb = "they late";
    const std::vector<generator::EncodedExample> batch = {
        model.Encode({"why are they always late", "<TOXIC> <NOT_THREAT>",
                      {0.9, 0.1, 0.4, 0.0, 0.7, 0.2}},
                     &ta),
        model.Encode({"they are late", "<NOT_TOXIC> <THREAT> <INSULT>",
                      {0.2, 0.6, 0.1, 0.8, 0.3, 0.5}},
                     &tb)};
    std::vector<nn::Parameter *> params;
    for (const auto &p : model.store().all()) params.push_back(p.get());
    const auto r = testing::CheckGradients(model.store(), params, [&](nn::Graph &gr) {
      return gr.Scale(gr.Add(model.Loss(gr, batch[0], {}), model.Loss(gr, batch[1], {})), 0.5);
    });
    c.Expect(r.max_rel_error <= 1e-3, generator::InfusionName(infusion) + " gradient");
    worst += fmt::format(" {} {:.1e} ({} entries)", generator::InfusionName(infusion),
                         r.max_rel_error, r.checked);
  }
  return c.Result(fmt::format("hand case {:.6f} vs tanh(4)*sigmoid(0)*2 = {:.6f}; 1000 random "
                              "bound checks; gradient rel. err:{}",
                              psi, hand, worst));
}

// ---- 6: overfit smoke ---------------------------------------------------------

struct SharedRegressor {
  std::unique_ptr<tox_regressor::ToxicityRegressor> model;
  tox_regressor::TrainingLog log;
  std::vector<corpus::ToxicityRecord> train, validation;
};

SharedRegressor &Regressor() {
  static SharedRegressor shared = [] {
    SharedRegressor s;
    synth::ToxicityCorpusOptions opts;
    opts.records = 10000;
    opts.seed = 77;
    corpus::ToxicitySplit split;
    split.records = synth::MakeToxicityRecords(opts);
    tox_regressor::RegressorConfig config;
    tox_regressor::StratifiedSplit(split.records, config.validation_fraction,
                                   MixSeed(config.seed, 1), &s.train, &s.validation);
    s.model = tox_regressor::TrainRegressor(split, config, &s.log);
    return s;
  }();
  return shared;
}

Outcome RegressorSanity() {
  Checks c;
  auto &r = Regressor();
  const double baseline = testing::ConstantPredictorRmse(r.train, r.validation);
  const double rmse = tox_regressor::EvaluateRmse(*r.model, r.validation);
  const double gain = 1.0 - rmse / baseline;
  c.Expect(gain >= 0.20, "relative improvement below 20%");
  std::vector<std::string> probes = {"", "<url>", std::string(5000, 'x'),
                                     "zzzz qqqq unknown words only"};
  for (const auto &rec : r.validation) probes.push_back(rec.text);
  for (const auto &t : synth::SlurFixtures()) probes.push_back(t);
  for (const auto &t : synth::BenignFixtures()) probes.push_back(t);
  std::string long_text;
  for (int i = 0; i < 400; ++i) long_text += "skeevs ";
  probes.push_back(long_text);
  size_t outputs = 0;
  for (const auto &text : probes) {
    for (double p : r.model->Predict(text)) {
      c.Expect(std::isfinite(p) && p >= 0.0 && p <= 1.0, "output outside [0, 1]");
      ++outputs;
    }
  }
  return c.Result(fmt::format("validation RMSE {} vs constant-mean {} ({:.1f}% better, {} "
                              "validation records); {} outputs in [0, 1]",
                              Fmt(rmse), Fmt(baseline), 100.0 * gain, r.validation.size(),
                              outputs));
}

Outcome OverfitSmoke() {
  using generator::Infusion;
  Checks c;
  synth::ExplanationCorpusOptions o;
  o.train_posts = 50;
  o.test_posts = 0;
  o.empty_explanation_rate = 0.0;
  o.seed = 606;
  const auto ds = corpus::ParseExplanationDataset(
      synth::MakeExplanationTable(o),
      corpus::ExplanationSchema::Default(corpus::SourceDataset::kSbicLike));
  const auto &records = ds.train.records;
  c.Expect(records.size() == 50, "50 samples");
  const auto &regressor = *Regressor().model;
  attributes::AttributeConfig attr;

  std::string summary;
  for (Infusion infusion : {Infusion::kNone, Infusion::kC1, Infusion::kC2, Infusion::kC5}) {
    std::vector<generator::TrainingPair> pairs;
    for (const auto &r : records) {
      generator::TrainingPair p;
      p.post_id = r.post.id;
      p.target = r.references.references.front();
      const auto tokens = attributes::ThresholdedTokens(regressor.Predict(r.post.text), attr);
      switch (infusion) {
        case Infusion::kC1:
          p.input.source = generator::BuildInputC1(r.post.text, tokens);
          break;
        case Infusion::kC2:
          p.input.source =
              generator::BuildInputC2(r.post.text, attributes::InDatasetString(r.attributes));
          break;
        case Infusion::kC5:
          p.input.source = r.post.text;
          p.input.attributes = tokens.text;
          break;
        default:
          p.input.source = r.post.text;
      }
      pairs.push_back(std::move(p));
    }
    generator::ModelConfig model;
    model.dim = 32;
    model.heads = 4;
    model.ffn = 64;
    model.encoder_layers = 1;
    model.decoder_layers = 1;
    model.max_positions = 64;
    model.max_source_tokens = 48;
    model.dropout = 0.0;
    model.infusion = infusion;
    model.seed = 11;
    generator::TrainerConfig trainer;
    trainer.epochs = 60;
    trainer.batch_size = 4;
    trainer.learning_rate = 3e-3;
    trainer.weight_decay = 0.0;
    trainer.seed = 11;
    generator::GeneratorTrainLog first, second;
    const auto trained = generator::TrainGenerator(pairs, model, trainer, &first);
    generator::TrainGenerator(pairs, model, trainer, &second);
    c.Expect(first.step_losses == second.step_losses,
             generator::InfusionName(infusion) + " loss curve not reproduced");

    std::vector<generator::GenerationRequest> requests;
    for (const auto &p : pairs) requests.push_back({p.post_id, p.input});
    generator::DecodeParams greedy;
    greedy.beams = 1;
    greedy.max_length = 32;
    const auto out = generator::Generate(*trained, requests, greedy, "overfit", 11);
    size_t exact = 0;
    for (size_t i = 0; i < out.size(); ++i) {
      exact += NormalizeSpace(out[i].text) == NormalizeSpace(pairs[i].target);
    }
    c.Expect(exact >= 45, generator::InfusionName(infusion) + " exact " + std::to_string(exact));
    summary += fmt::format("{}{} {}/50 (loss {:.3f} -> {:.4f})", summary.empty() ? "" : ", ",
                           generator::InfusionName(infusion), exact, first.epoch_losses.front(),
                           first.epoch_losses.back());
  }
  return c.Result(summary + "; repeated runs give identical step losses");
}

// ---- 8: pipeline integration --------------------------------------------------

int RunCli(const std::vector<std::string> &args, const fs::path &log) {
  std::string cmd = std::string(TOXEXPLAIN_CLI);
  for (const auto &a : args) cmd += " '" + a + "'";
  cmd += " >> '" + log.string() + "' 2>&1";
  return std::system(cmd.c_str());
}

Outcome PipelineIntegration() {
  Checks c;
  const fs::path root = WorkDir("pipeline");
  const fs::path log = root / "cli.log";
  synth::DemoDataOptions demo;
  demo.explanation_train = 200;
  demo.explanation_test = 200;
  demo.toxicity_records = 5000;
  demo.kg_tuples = 500;
  demo.seed = 808;
  synth::WriteDemoData(root / "raw", demo);
  const std::string ws = (root / "ws").string();
  auto step = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {"-w", ws, "--log-level", "warn"});
    const int rc = RunCli(args, log);
    c.Expect(rc == 0, args[4] + " exited with " + std::to_string(rc));
    return rc == 0;
  };
  if (!step({"prepare", "--id", "sbic", "--input", (root / "raw" / "sbic_like.csv").string()}) ||
      !step({"train-regressor", "--input", (root / "raw" / "toxicity.csv").string()}) ||
      !step({"attr-infer", "--dataset", "sbic"}) ||
      !step({"kg-index", "--id", "cn", "--input", (root / "raw" / "conceptnet_like.tsv").string()})) {
    return c.Result("setup failed, see " + log.string());
  }

  const Json common = {{"dataset", "sbic"},
                       {"train_limit", 200},
                       {"test_limit", 200},
                       {"model", {{"dim", 32}, {"heads", 4}, {"ffn", 64},
                                  {"encoder_layers", 1}, {"decoder_layers", 1},
                                  {"max_positions", 192}, {"max_source_tokens", 128},
                                  {"dropout", 0.0}}},
                       {"trainer", {{"epochs", 4}, {"batch_size", 8}, {"learning_rate", 3e-3}}},
                       {"decode", {{"beams", 2}, {"length_penalty", 1.0}, {"max_length", 24}}},
                       {"toxicity_scorer", "regressor"},
                       {"seed", 3}};
  const std::vector<std::pair<std::string, Json>> grid = {
      {"none", {{"infusion", "none"}}},
      {"c1", {{"infusion", "c1"}}},
      {"c2", {{"infusion", "c2"}}},
      {"c1_all_ones", {{"infusion", "c1"}, {"attribute_source", "perturbed"},
                       {"perturb", "all_ones"}}},
      {"kg_top", {{"infusion", "kg"}, {"kg", {{"id", "cn"}, {"mode", "top"}, {"k", 10}}}}},
      {"kg_random", {{"infusion", "kg"}, {"kg", {{"id", "cn"}, {"mode", "random"}, {"k", 10}}}}}};
  for (const auto &[name, extra] : grid) {
    Json config = common;
    config.update(extra);
    config["name"] = name;
    const fs::path path = root / (name + ".json");
    WriteJsonAtomic(path, config);
    step({"evaluate", "--config", path.string()});
  }
  step({"report"});

  size_t results = 0;
  if (fs::exists(fs::path(ws) / "results")) {
    for (const auto &r : experiment::LoadResults(fs::path(ws) / "results")) {
      ++results;
      c.Expect(r.metrics.max_bleu && r.metrics.rouge_l_f1 && r.metrics.bert_score_f1 &&
                   r.metrics.toxicity,
               RunLabel(r) + " has a null metric");
      c.Expect(r.metrics.evaluated > 0, RunLabel(r) + " evaluated nothing");
    }
  }
  c.Expect(results == grid.size(), fmt::format("{} result files", results));
  size_t rows = 0;
  for (const char *name : {"table2.csv", "table4.csv", "table6.csv", "table8.csv"}) {
    const fs::path path = fs::path(ws) / "reports" / name;
    if (!fs::exists(path)) {
      c.Expect(false, std::string(name) + " missing");
      continue;
    }
    const auto table = ReadDelimited(path, ',');
    c.Expect(!table.rows.empty(), std::string(name) + " has no rows");
    for (const auto &row : table.rows) {
      ++rows;
      c.Expect(row.size() == table.header.size(), std::string(name) + " ragged row");
      for (const auto &cell : row) {
        c.Expect(!Trim(cell).empty() && cell != "null" && cell != "nan",
                 std::string(name) + " null cell");
      }
    }
  }
  return c.Result(fmt::format("{} runs on 200 train / 200 test posts, 4 tables with {} rows",
                              results, rows));
}

// ---- 9-12: full-scale tier ------------------------------------------------------

std::optional<std::string> Env(const char *name) {
  const char *v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

fs::path FullWorkspace() {
  if (auto dir = Env("TOXEXPLAIN_FULL_WORKSPACE")) return *dir;
  return fs::temp_directory_path() / "toxexplain_full";
}

// Prepares a dataset once per workspace.
void EnsureDataset(const experiment::Workspace &ws, const std::string &id, const fs::path &input,
                   corpus::SourceDataset source) {
  if (fs::exists(ws.SplitPath(id, corpus::SplitName::kTest))) return;
  auto schema = corpus::ExplanationSchema::Default(source);
  const std::string ext = ToLowerAscii(input.extension().string());
  if (ext == ".jsonl") schema.format = corpus::TableFormat::kJsonLines;
  if (ext == ".tsv") schema.format = corpus::TableFormat::kTsv;
  experiment::PrepareDataset(ws, id, input, schema);
}

experiment::ExperimentConfig FullConfig(const std::string &dataset, const std::string &infusion,
                                        Json extra = Json::object()) {
  Json j = {{"name", dataset + "_" + infusion}, {"dataset", dataset}, {"infusion", infusion},
            {"seed", 1}};
  j.update(extra);
  return experiment::ExperimentConfig::FromJson(j);
}

Outcome FullBaselines() {
  const auto sbic = Env("TOXEXPLAIN_SBIC");
  const auto lh = Env("TOXEXPLAIN_LATENT_HATRED");
  if (!sbic || !lh) return {Status::kSkip, "set TOXEXPLAIN_SBIC and TOXEXPLAIN_LATENT_HATRED"};
  Checks c;
  experiment::Workspace ws(FullWorkspace());
  EnsureDataset(ws, "sbic", *sbic, corpus::SourceDataset::kSbicLike);
  EnsureDataset(ws, "latent_hatred", *lh, corpus::SourceDataset::kLatentHatredLike);
  experiment::ExperimentRunner runner(ws);
  const auto vanilla = runner.Run(FullConfig("sbic", "none"));
  const auto c2 = runner.Run(FullConfig("latent_hatred", "c2"));
  const double vb = vanilla.metrics.max_bleu->mean, vr = 100 * vanilla.metrics.rouge_l_f1->mean;
  const double cb = c2.metrics.max_bleu->mean, cr = 100 * c2.metrics.rouge_l_f1->mean;
  c.Expect(std::abs(vb - 72.17) <= 3.0 && std::abs(vr - 70.83) <= 3.0, "vanilla off target");
  c.Expect(std::abs(cb - 47.72) <= 3.0 && std::abs(cr - 34.70) <= 3.0, "c2 off target");
  return c.Result(fmt::format("vanilla B {:.2f} R {:.2f} (target 72.17/70.83); c2 B {:.2f} R "
                              "{:.2f} (target 47.72/34.70)",
                              vb, vr, cb, cr));
}

Outcome FullRegressor() {
  const auto data = Env("TOXEXPLAIN_TOXICITY");
  if (!data) return {Status::kSkip, "set TOXEXPLAIN_TOXICITY"};
  Checks c;
  experiment::Workspace ws(FullWorkspace());
  corpus::ToxicitySchema schema;
  const auto log = experiment::TrainWorkspaceRegressor(ws, "full", *data, schema,
                                                       tox_regressor::RegressorConfig{});
  c.Expect(log.best_validation_rmse <= 0.08, "validation RMSE above 0.08");
  return c.Result("best validation RMSE " + Fmt(log.best_validation_rmse, 5));
}

Outcome FullKgAudit() {
  const auto sbic = Env("TOXEXPLAIN_SBIC");
  const auto kg = Env("TOXEXPLAIN_CONCEPTNET");
  if (!sbic || !kg) return {Status::kSkip, "set TOXEXPLAIN_SBIC and TOXEXPLAIN_CONCEPTNET"};
  Checks c;
  experiment::Workspace ws(FullWorkspace());
  EnsureDataset(ws, "sbic", *sbic, corpus::SourceDataset::kSbicLike);
  if (!fs::exists(ws.KgIndexDir("conceptnet"))) {
    experiment::BuildKnowledgeGraph(ws, "conceptnet", *kg, experiment::TupleFormat::kDump);
  }
  const auto config = FullConfig("sbic", "kg", {{"kg", {{"id", "conceptnet"}}}});
  experiment::PrepareExamples(ws, config, corpus::SplitName::kTest);
  const auto scores = experiment::LoadRetrievalScores(ws.KgCachePath("conceptnet", "sbic"),
                                                      "idf_relevance", "top");
  const double share = analysis::FractionWithMaxAtLeast(scores, 5.0);
  c.Expect(std::abs(share - 0.035) <= 0.01, "share outside 3.5% +- 1pp");
  return c.Result(fmt::format("{:.2f}% of {} posts have a tuple scoring >= 5", 100 * share,
                              scores.size()));
}

Outcome FullKgModes() {
  const auto lh = Env("TOXEXPLAIN_LATENT_HATRED");
  const auto kg = Env("TOXEXPLAIN_CONCEPTNET");
  if (!lh || !kg) return {Status::kSkip, "set TOXEXPLAIN_LATENT_HATRED and TOXEXPLAIN_CONCEPTNET"};
  Checks c;
  experiment::Workspace ws(FullWorkspace());
  EnsureDataset(ws, "latent_hatred", *lh, corpus::SourceDataset::kLatentHatredLike);
  if (!fs::exists(ws.KgIndexDir("conceptnet"))) {
    experiment::BuildKnowledgeGraph(ws, "conceptnet", *kg, experiment::TupleFormat::kDump);
  }
  experiment::ExperimentRunner runner(ws);
  std::vector<std::pair<std::string, experiment::ExperimentResult>> modes;
  for (const char *mode : {"top", "bottom", "random"}) {
    modes.emplace_back(mode, runner.Run(FullConfig("latent_hatred", "kg",
                                                   {{"name", std::string("lh_kg_") + mode},
                                                    {"kg", {{"id", "conceptnet"},
                                                            {"mode", mode}}}})));
  }
  const auto vanilla = runner.Run(FullConfig("latent_hatred", "none"));
  std::string detail;
  for (const char *metric : {"max_bleu", "rouge_l_f1", "bert_score_f1"}) {
    for (size_t i = 0; i < modes.size(); ++i) {
      for (size_t j = i + 1; j < modes.size(); ++j) {
        const auto p = analysis::AlignMetric(modes[i].second.metrics.samples,
                                             modes[j].second.metrics.samples, metric);
        const auto t = analysis::PairedTTest(p.a, p.b);
        c.Expect(std::abs(t.effect_size) < 0.5, modes[i].first + "/" + modes[j].first + " " + metric);
      }
      const auto p = analysis::AlignMetric(modes[i].second.metrics.samples,
                                           vanilla.metrics.samples, metric);
      const auto t = analysis::PairedTTest(p.a, p.b);
      c.Expect(std::abs(t.effect_size) > 1.0 && t.p <= 0.001,
               modes[i].first + " vs vanilla " + metric);
      detail += fmt::format(" {}/{} d={:.2f}", modes[i].first, metric, t.effect_size);
    }
  }
  return c.Result("kg vs vanilla:" + detail);
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  struct Criterion {
    int id;
    const char *name;
    bool mandatory;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "attribute thresholding", true, Thresholding},
      {2, "kg ranking oracle", true, KnowledgeRankings},
      {3, "metric oracles", true, MetricOracles},
      {4, "paired t-test oracle", true, Statistics},
      {5, "de-attention numerics", true, CodaNumerics},
      {6, "overfit smoke", true, OverfitSmoke},
      {7, "regressor sanity", true, RegressorSanity},
      {8, "pipeline integration", true, PipelineIntegration},
      {9, "full-scale baselines", false, FullBaselines},
      {10, "full-scale regressor", false, FullRegressor},
      {11, "large-kg score audit", false, FullKgAudit},
      {12, "kg selection modes", false, FullKgModes},
  };
  int failures = 0;
  for (const auto &criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception &e) {
      outcome = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char *tag = outcome.status == Status::kPass   ? "PASS"
                      : outcome.status == Status::kSkip ? "SKIP"
                                                        : "FAIL";
    std::cout << fmt::format("[{}] {:2d} {}: {} ({:.1f}s)", tag, criterion.id, criterion.name,
                             outcome.detail, seconds)
              << std::endl;
    if (criterion.id == 5) {
      std::cout << "     note: the stated approximation 1.9993 equals 1 + tanh(4); the stated "
                   "expression tanh(4)*sigmoid(0)*2 evaluates to 0.99933, which is what is "
                   "checked"
                << std::endl;
    }
    if (outcome.status == Status::kFail) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
