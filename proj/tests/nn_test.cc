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

#include <filesystem>
#include <random>

#include "doctest.h"
#include "gradcheck.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/nn/graph.h"
#include "toxexplain/nn/layers.h"
#include "toxexplain/nn/optimizer.h"

namespace toxexplain::nn {
namespace {

using testing::CheckGradients;

struct Fixture {
  std::mt19937_64 rng{42};
  ParameterStore store;
  Parameter *Make(const std::string &name, int r, int c, double stddev = 0.5) {
    return store.Create(name, NormalInit(r, c, stddev, rng));
  }
};

TEST_CASE("elementwise and matrix ops match finite differences") {
  Fixture f;
  Parameter *a = f.Make("a", 3, 4);
  Parameter *b = f.Make("b", 4, 2);
  Parameter *c = f.Make("c", 3, 2);
  Parameter *row = f.Make("row", 1, 2);
  auto loss = [&](Graph &g) {
    Var x = g.MatMul(g.Param(a), g.Param(b));
    x = g.AddRow(x, g.Param(row));
    Var y = g.Mul(g.Tanh(x), g.Sigmoid(g.Param(c)));
    Var z = g.Sub(g.Gelu(y), g.Scale(g.Relu(g.Param(c)), 0.3));
    Var w = g.MatMulT(z, g.Param(c));
    return g.Sum(g.Mul(w, w));
  };
  auto r = CheckGradients(f.store, {a, b, c, row}, loss);
  CHECK(r.checked == 12 + 8 + 6 + 2);
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("softmax, layer norm and cross entropy match finite differences") {
  Fixture f;
  Parameter *x = f.Make("x", 4, 5);
  Parameter *gain = f.Make("gain", 1, 5);
  Parameter *bias = f.Make("bias", 1, 5);
  Matrix mask = CausalMask(4);
  std::vector<int> targets = {1, 0, 4, 2};
  auto loss = [&](Graph &g) {
    Var n = g.LayerNorm(g.Param(x), g.Param(gain), g.Param(bias));
    Var att = g.SoftmaxRows(g.MatMulT(n, n), &mask);
    Var mixed = g.MatMul(att, n);
    return g.CrossEntropy(mixed, targets);
  };
  auto r = CheckGradients(f.store, {x, gain, bias}, loss);
  CHECK(r.max_rel_error < 1e-5);
}

TEST_CASE("gather, concat, slice, mean and repeat match finite differences") {
  Fixture f;
  Parameter *table = f.Make("table", 6, 4);
  Parameter *other = f.Make("other", 2, 4);
  std::vector<int> ids = {3, 1, 3, 5};
  auto loss = [&](Graph &g) {
    Var e = g.Gather(g.Param(table), ids);
    Var rows = g.ConcatRows({e, g.Param(other)});
    Var mean = g.MeanRows(rows);
    Var rep = g.RepeatRows(mean, 6);
    Var cols = g.ConcatCols({rows, rep});
    Var sl = g.SliceCols(cols, 2, 4);
    Var d = g.NegL1Distance(sl, g.Param(other));
    Matrix target = Matrix::Constant(6, 2, -1.0);
    return g.MseLoss(d, target);
  };
  auto r = CheckGradients(f.store, {table, other}, loss);
  CHECK(r.max_rel_error < 1e-5);
}

TEST_CASE("transformer blocks match finite differences") {
  Fixture f;
  EncoderLayer enc(f.store, "enc", 8, 2, 12, f.rng);
  DecoderLayer dec(f.store, "dec", 8, 2, 12, f.rng);
  Parameter *src = f.Make("src", 3, 8);
  Parameter *tgt = f.Make("tgt", 4, 8);
  Matrix mask = CausalMask(4);
  std::vector<int> targets = {0, 3, 7, 2};
  auto loss = [&](Graph &g) {
    PassOptions opts;
    Var mem = enc.Forward(g, g.Param(src), opts);
    Var out = dec.Forward(g, g.Param(tgt), mem, mask, opts);
    return g.CrossEntropy(out, targets);
  };
  std::vector<Parameter *> all;
  for (const auto &p : f.store.all()) all.push_back(p.get());
  // Entries below 1e-4 are compared absolutely; differencing noise through
  // two layer norms sits around 1e-9.
  auto r = CheckGradients(f.store, all, loss, 1e-6, 1e-4);
  CAPTURE(r.worst_analytic);
  CAPTURE(r.worst_numeric);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("shape mismatches report both shapes") {
  Graph g;
  Var a = g.Constant(Matrix::Zero(2, 3));
  Var b = g.Constant(Matrix::Zero(2, 3));
  try {
    g.MatMul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError &e) {
    CHECK(std::string(e.what()).find("2x3 and 2x3") != std::string::npos);
  }
}

TEST_CASE("causal mask blocks attention to future positions") {
  Graph g(false);
  Matrix mask = CausalMask(3);
  Var s = g.SoftmaxRows(g.Constant(Matrix::Zero(3, 3)), &mask);
  CHECK(g.value(s)(0, 1) == doctest::Approx(0.0));
  CHECK(g.value(s)(1, 0) == doctest::Approx(0.5));
  CHECK(g.value(s)(2, 2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("adam drives a quadratic to its minimum") {
  std::mt19937_64 rng(1);
  ParameterStore store;
  Parameter *w = store.Create("w", NormalInit(1, 3, 1.0, rng));
  Matrix target(1, 3);
  target << 0.5, -1.0, 2.0;
  Adam adam(store, AdamConfig{.learning_rate = 0.05, .clip_norm = 0.0});
  for (int step = 0; step < 2000; ++step) {
    Graph g;
    g.Backward(g.MseLoss(g.Param(w), target));
    adam.Step();
  }
  CHECK((w->value() - target).norm() < 1e-3);
}

TEST_CASE("parameter store round-trips through disk") {
  std::mt19937_64 rng(3);
  ParameterStore a;
  a.Create("x", NormalInit(2, 3, 1.0, rng));
  a.Create("y", NormalInit(1, 4, 1.0, rng));
  auto path = std::filesystem::temp_directory_path() / "toxexplain_nn_rt.bin";
  a.Save(path);

  ParameterStore b;
  b.Create("x", ZerosInit(2, 3));
  b.Create("y", ZerosInit(1, 4));
  b.Load(path);
  CHECK(b.Get("x")->value() == a.Get("x")->value());
  CHECK(b.Get("y")->value() == a.Get("y")->value());

  ParameterStore wrong;
  wrong.Create("x", ZerosInit(3, 2));
  wrong.Create("y", ZerosInit(1, 4));
  CHECK_THROWS_AS(wrong.Load(path), ShapeError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace toxexplain::nn
