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

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "gradcheck.h"
#include "oracle_coda.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/corpus/dataset.h"
#include "toxexplain/generator/coda.h"
#include "toxexplain/generator/decode.h"
#include "toxexplain/generator/inputs.h"
#include "toxexplain/generator/model.h"
#include "toxexplain/generator/trainer.h"
#include "toxexplain/synth/synth.h"

namespace toxexplain::generator {
namespace {

namespace fs = std::filesystem;
using attributes::AttributeKind;
using attributes::AttributeString;
using nn::Matrix;

// ---- input builders ---------------------------------------------------------

TEST_CASE("C1 and C2 builders lay out post, separator, attributes") {
  AttributeString toks{"<TOXIC> <NOT_SEVERE_TOXIC> <OBSCENE> <NOT_THREAT> "
                       "<INSULT> <IDENTITY_ATTACK>",
                       AttributeKind::kToxicityTokens};
  CHECK(BuildInputC1("a post", toks) == "a post [SEP] " + toks.text);
  CHECK(BuildInputC1("a post", {"", AttributeKind::kToxicityTokens}) == "a post");
  CHECK(BuildInputC1("a post", toks, false) == toks.text + " [SEP] a post");
  AttributeString in_data{"offensive group-targeting black folks",
                          AttributeKind::kInDataset};
  CHECK(BuildInputC2("a post", in_data) ==
        "a post [SEP] offensive group-targeting black folks");
  CHECK(BuildInputC2("a post", {"", AttributeKind::kInDataset}) == "a post");
  CHECK_THROWS_AS(BuildInputC1("a post", in_data), PreconditionError);
  CHECK_THROWS_AS(BuildInputC2("a post", toks), PreconditionError);
}

TEST_CASE("stripping the attribute suffix recovers the post") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> words = {"why", "are", "they", ",", "<url>",
                                          "[sep]", "sep", "?", "glorbians"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string post;
    for (int k = 1 + static_cast<int>(rng() % 8); k > 0; --k) {
      post += (post.empty() ? "" : " ") + words[rng() % words.size()];
    }
    attributes::ToxicityProbabilities p;
    for (double &v : p) v = static_cast<double>(rng() % 100) / 100.0;
    attributes::AttributeConfig cfg;
    cfg.rendering = trial % 2 ? attributes::Rendering::kPlainPrompt
                              : attributes::Rendering::kSpecialTokens;
    AttributeString toks = attributes::ThresholdedTokens(p, cfg);
    for (bool post_first : {true, false}) {
      CHECK(RecoverPost(BuildInputC1(post, toks, post_first), post_first) == post);
    }
    corpus::InDatasetAttributes a;
    a.target_group = trial % 3 ? "skyfolk" : "";
    a.implicit_class = corpus::ImplicitClass::kIrony;
    CHECK(RecoverPost(BuildInputC2(post, attributes::InDatasetString(a))) == post);
  }
}

TEST_CASE("none and C1 with all-NOT tokens share the post prefix") {
  nn::Vocabulary vocab = nn::Vocabulary::Build({"you know how glorbians are"},
                                               GeneratorSpecialTokens());
  const std::string post = "you know how glorbians are";
  auto zeros = attributes::PerturbProbabilities(attributes::PerturbMode::kAllZeros, {});
  std::string c1 = BuildInputC1(post, attributes::ThresholdedTokens(zeros, {}));
  auto plain = vocab.Encode(post);
  auto infused = vocab.Encode(c1);
  REQUIRE(infused.size() == plain.size() + 7);
  CHECK(std::equal(plain.begin(), plain.end(), infused.begin()));
  CHECK(vocab.Token(infused[plain.size()]) == "[SEP]");
  for (size_t i = plain.size() + 1; i < infused.size(); ++i) {
    CHECK(StartsWith(vocab.Token(infused[i]), "<NOT_"));
  }
}

// ---- de-attention -------------------------------------------------------------

TEST_CASE("de-attention 1x1 hand case") {
  nn::Graph g(false);
  Matrix two = Matrix::Constant(1, 1, 2.0);
  nn::Var psi = CodaAttention(g, g.Constant(two), g.Constant(two), g.Constant(two),
                              NegativeL1Affinity(1.0));
  // tanh(2*2/1) * sigmoid(0) * 2
  const double hand = std::tanh(4.0) * 0.5 * 2.0;
  CHECK(hand == doctest::Approx(0.999329299739067).epsilon(1e-12));
  CHECK(g.Scalar(psi) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("de-attention matches the loop oracle and respects the value bound") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(1, 6);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = dim(rng), m = dim(rng), dk = dim(rng), dv = dim(rng);
    Matrix q(n, dk), k(m, dk), v(m, dv);
    for (Matrix *x : {&q, &k, &v}) {
      for (Eigen::Index i = 0; i < x->size(); ++i) x->data()[i] = normal(rng);
    }
    nn::Graph g(false);
    const Matrix &psi = g.value(CodaAttention(g, g.Constant(q), g.Constant(k),
                                              g.Constant(v), NegativeL1Affinity(1.0)));
    Matrix expected = testing::PsiOracle(q, k, v, 1.0);
    REQUIRE(psi.rows() == n);
    REQUIRE(psi.cols() == dv);
    CHECK((psi - expected).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::RowVectorXd bound = v.cwiseAbs().colwise().sum();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dv; ++j) CHECK(std::abs(psi(i, j)) <= bound(j) + 1e-12);
    }
  }
}

TEST_CASE("de-attention rejects mismatched widths") {
  nn::Graph g(false);
  CHECK_THROWS_AS(CodaAttention(g, g.Constant(Matrix::Zero(2, 3)),
                                g.Constant(Matrix::Zero(2, 4)),
                                g.Constant(Matrix::Zero(2, 4)), NegativeL1Affinity(1.0)),
                  ShapeError);
}

// ---- tiny model helpers ---------------------------------------------------------

ModelConfig TinyConfig(Infusion infusion) {
  ModelConfig c;
  c.dim = 8;
  c.heads = 2;
  c.ffn = 16;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.max_positions = 16;
  c.max_source_tokens = 12;
  c.dropout = 0.0;
  c.infusion = infusion;
  c.seed = 3;
  return c;
}

nn::Vocabulary TinyVocab() {
  return nn::Vocabulary::Build({"why are they always late", "they are lazy",
                                "toxic not severely"},
                               GeneratorSpecialTokens());
}

std::vector<EncodedExample> TwoSamples(const Seq2SeqModel &model) {
  ModelInput a{"why are they always late", "<TOXIC> <NOT_THREAT>",
               {0.9, 0.1, 0.4, 0.0, 0.7, 0.2}};
  ModelInput b{"they are late", "<NOT_TOXIC> <THREAT> <INSULT>",
               {0.2, 0.6, 0.1, 0.8, 0.3, 0.5}};
  std::string ta = "they are lazy", tb = "they late";
  return {model.Encode(a, &ta), model.Encode(b, &tb)};
}

testing::GradCheckResult CheckFusionGradients(Infusion infusion,
                                              std::vector<nn::Parameter *> params = {}) {
  Seq2SeqModel model(TinyVocab(), TinyConfig(infusion));
  auto batch = TwoSamples(model);
  if (params.empty()) {
    for (const auto &p : model.store().all()) params.push_back(p.get());
  }
  auto loss = [&](nn::Graph &g) {
    nn::Var total = model.Loss(g, batch[0], {});
    total = g.Add(total, model.Loss(g, batch[1], {}));
    return g.Scale(total, 0.5);
  };
  return testing::CheckGradients(model.store(), params, loss);
}

TEST_CASE("fusion gradients match finite differences on a 2-sample batch") {
  for (Infusion infusion : {Infusion::kC3, Infusion::kC4, Infusion::kC5}) {
    CAPTURE(InfusionName(infusion));
    auto r = CheckFusionGradients(infusion);
    CAPTURE(r.worst_analytic);
    CAPTURE(r.worst_numeric);
    CHECK(r.checked > 1000);
    CHECK(r.max_rel_error <= 1e-3);
  }
}

TEST_CASE("probability lift gradient within 1e-4") {
  Seq2SeqModel model(TinyVocab(), TinyConfig(Infusion::kC3));
  auto batch = TwoSamples(model);
  auto loss = [&](nn::Graph &g) {
    return g.Scale(g.Add(model.Loss(g, batch[0], {}), model.Loss(g, batch[1], {})), 0.5);
  };
  // A wider step keeps cancellation noise (loss ~ 3, eps ~ 1e-16) well
  // below the 1e-6 gradients seen here.
  auto r = testing::CheckGradients(
      model.store(), {model.probability_lift_weight(), model.probability_lift_bias()}, loss,
      1e-5);
  CAPTURE(r.worst_analytic);
  CAPTURE(r.worst_numeric);
  CHECK(r.checked == 6 * 8 + 8);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("fusion shapes") {
  Seq2SeqModel c3(TinyVocab(), TinyConfig(Infusion::kC3));
  auto batch = TwoSamples(c3);
  nn::Graph g(false);
  nn::Var lifted = c3.LiftProbabilities(g, batch[0].probabilities);
  CHECK(g.value(lifted).rows() == 1);
  CHECK(g.value(lifted).cols() == 8);
  nn::Var h_utter = c3.EncodeIds(g, batch[0].source, {});
  nn::Var fused = c3.FuseConcat(g, h_utter, c3.EncodeRows(g, lifted, {}));
  CHECK(g.value(fused).rows() == g.value(h_utter).rows());
  CHECK(g.value(fused).cols() == 8);
  try {
    c3.FuseConcat(g, h_utter, g.Constant(Matrix::Zero(1, 5)));
    FAIL("expected ShapeError");
  } catch (const ShapeError &e) {
    std::string what = e.what();
    CHECK(what.find("6x8") != std::string::npos);
    CHECK(what.find("1x5") != std::string::npos);
  }

  // Zero probabilities through a zeroed lift give a zero row.
  c3.probability_lift_weight()->value().setZero();
  c3.probability_lift_bias()->value().setZero();
  nn::Var zero_lift = c3.LiftProbabilities(g, {});
  CHECK(g.value(zero_lift).isZero());
  Matrix from_lift = g.value(c3.EncodeRows(g, zero_lift, {}));
  Matrix from_zero = g.value(c3.EncodeRows(g, g.Constant(Matrix::Zero(1, 8)), {}));
  CHECK(from_lift == from_zero);

  Seq2SeqModel c5(TinyVocab(), TinyConfig(Infusion::kC5));
  nn::Graph g5(false);
  auto ex = TwoSamples(c5)[0];
  nn::Var u = c5.EncodeIds(g5, ex.source, {});
  nn::Var t = c5.EncodeIds(g5, ex.attributes, {});
  for (const char *name : {"fusion.coda.v.weight", "fusion.coda.v.bias"}) {
    c5.store().Get(name)->value().setZero();
  }
  CHECK(g5.value(c5.FuseCoda(g5, t, u)) == g5.value(u));
  CHECK_THROWS_AS(c5.FuseCoda(g5, g5.Constant(Matrix::Zero(2, 4)), u), ShapeError);
}

// ---- training and decoding ------------------------------------------------------

std::vector<TrainingPair> SyntheticPairs(size_t posts, Infusion infusion) {
  synth::ExplanationCorpusOptions o;
  o.train_posts = posts;
  o.test_posts = 0;
  o.empty_explanation_rate = 0.0;
  auto ds = corpus::ParseExplanationDataset(
      synth::MakeExplanationTable(o),
      corpus::ExplanationSchema::Default(corpus::SourceDataset::kSbicLike));
  std::vector<TrainingPair> pairs;
  for (const auto &r : ds.train.records) {
    TrainingPair p;
    p.post_id = r.post.id;
    p.target = r.references.references.front();
    if (infusion == Infusion::kC2) {
      p.input.source = BuildInputC2(r.post.text, attributes::InDatasetString(r.attributes));
    } else {
      p.input.source = r.post.text;
    }
    pairs.push_back(p);
  }
  return pairs;
}

ModelConfig SmallConfig(Infusion infusion) {
  ModelConfig c;
  c.dim = 32;
  c.heads = 4;
  c.ffn = 64;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.max_positions = 64;
  c.max_source_tokens = 48;
  c.dropout = 0.0;
  c.infusion = infusion;
  return c;
}

TrainerConfig SmallTrainer(int epochs) {
  TrainerConfig t;
  t.epochs = epochs;
  t.batch_size = 4;
  t.learning_rate = 3e-3;
  t.weight_decay = 0.0;
  return t;
}

TEST_CASE("loss falls below a tenth of its start within 30 epochs, deterministically") {
  auto pairs = SyntheticPairs(50, Infusion::kNone);
  GeneratorTrainLog a, b;
  auto model = TrainGenerator(pairs, SmallConfig(Infusion::kNone), SmallTrainer(30), &a);
  TrainGenerator(pairs, SmallConfig(Infusion::kNone), SmallTrainer(30), &b);
  CHECK(a.epoch_losses.back() < 0.1 * a.epoch_losses.front());
  CHECK(a.step_losses == b.step_losses);

  SUBCASE("beams=1 equals greedy, repeated decoding is stable") {
    DecodeParams one;
    one.beams = 1;
    one.max_length = 24;
    for (size_t i = 0; i < 5; ++i) {
      auto ex = model->Encode(pairs[i].input);
      CHECK(BeamSearch(*model, ex, one) == GreedyDecode(*model, ex, 24));
      DecodeParams wide;
      wide.max_length = 24;
      CHECK(BeamSearch(*model, ex, wide) == BeamSearch(*model, ex, wide));
    }
  }

  SUBCASE("checkpoint round trip reproduces generations") {
    fs::path dir = fs::temp_directory_path() / "toxexplain_gen_ckpt";
    fs::remove_all(dir);
    model->Save(dir);
    auto loaded = Seq2SeqModel::Load(dir);
    std::vector<GenerationRequest> reqs;
    for (size_t i = 0; i < 5; ++i) reqs.push_back({pairs[i].post_id, pairs[i].input});
    DecodeParams dp;
    dp.beams = 3;
    dp.max_length = 24;
    auto x = Generate(*model, reqs, dp, "h", 1);
    auto y = Generate(*loaded, reqs, dp, "h", 1);
    for (size_t i = 0; i < x.size(); ++i) CHECK(x[i].ToJson() == y[i].ToJson());
    fs::remove_all(dir);
  }
}

TEST_CASE("over-long generator inputs are truncated with a warning") {
  Seq2SeqModel model(TinyVocab(), TinyConfig(Infusion::kNone));
  std::string text;
  for (int i = 0; i < 40; ++i) text += "why ";
  EncodedExample ex = model.Encode({text, "", {}});
  CHECK(ex.truncated);
  CHECK(ex.source.size() == 12);
  CHECK(ex.source.back() == nn::Vocabulary::kEos);
  CHECK(model.truncation_count() == 1);
}

TEST_CASE("a non-finite loss aborts and keeps the last finite weights") {
  Seq2SeqModel model(TinyVocab(), TinyConfig(Infusion::kC3));
  std::vector<TrainingPair> pairs = {
      {"a", {"why are they", "", {0.1, 0.2, 0.3, 0.4, 0.5, std::nan("")}}, "they are lazy"}};
  auto before = model.store().Snapshot();
  fs::path dir = fs::temp_directory_path() / "toxexplain_gen_failure";
  fs::remove_all(dir);
  TrainerConfig cfg = SmallTrainer(1);
  cfg.failure_checkpoint = dir.string();
  CHECK_THROWS_AS(TrainModel(model, pairs, cfg), TrainingError);
  auto after = model.store().Snapshot();
  for (size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
  CHECK(fs::exists(dir / "weights.bin"));
  fs::remove_all(dir);
}

TEST_CASE("decode parameters") {
  DecodeParams d;
  CHECK(d.beams == 10);
  CHECK(d.length_penalty == 5.0);
  d.beams = 0;
  CHECK_THROWS_AS(d.Validate(), PreconditionError);
  ModelConfig m;
  CHECK(m.dim == 768);
  CHECK(ModelConfig::FromJson(m.ToJson()).ToJson() == m.ToJson());
}

}  // namespace
}  // namespace toxexplain::generator
