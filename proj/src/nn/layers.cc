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

#include "toxexplain/nn/layers.h"

#include <cmath>

#include "toxexplain/common/errors.h"

namespace toxexplain::nn {

Linear::Linear(ParameterStore &store, const std::string &name, int in, int out,
               std::mt19937_64 &rng, bool bias, double init_std)
    : in_(in), out_(out) {
  weight_ = store.Create(name + ".weight", NormalInit(in, out, init_std, rng));
  if (bias) bias_ = store.Create(name + ".bias", ZerosInit(1, out));
}

Var Linear::Forward(Graph &g, Var x) const {
  Var y = g.MatMul(x, g.Param(weight_));
  if (bias_ != nullptr) y = g.AddRow(y, g.Param(bias_));
  return y;
}

LayerNormLayer::LayerNormLayer(ParameterStore &store, const std::string &name,
                               int dim) {
  gain_ = store.Create(name + ".gain", OnesInit(1, dim));
  bias_ = store.Create(name + ".bias", ZerosInit(1, dim));
}

Var LayerNormLayer::Forward(Graph &g, Var x) const {
  return g.LayerNorm(x, g.Param(gain_), g.Param(bias_));
}

Matrix CausalMask(int n) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) m(i, j) = -1e9;
  }
  return m;
}

MultiHeadAttention::MultiHeadAttention(ParameterStore &store,
                                       const std::string &name, int dim,
                                       int heads, std::mt19937_64 &rng)
    : dim_(dim), heads_(heads) {
  if (heads <= 0 || dim % heads != 0) {
    throw PreconditionError("attention width " + std::to_string(dim) +
                            " is not divisible by " + std::to_string(heads) +
                            " heads");
  }
  q_ = Linear(store, name + ".q", dim, dim, rng);
  k_ = Linear(store, name + ".k", dim, dim, rng);
  v_ = Linear(store, name + ".v", dim, dim, rng);
  o_ = Linear(store, name + ".o", dim, dim, rng);
}

Var MultiHeadAttention::Forward(Graph &g, Var query, Var memory,
                                const Matrix *mask) const {
  Var q = q_.Forward(g, query);
  Var k = k_.Forward(g, memory);
  Var v = v_.Forward(g, memory);
  const int head_dim = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> outs;
  outs.reserve(static_cast<size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    Var qh = heads_ == 1 ? q : g.SliceCols(q, h * head_dim, head_dim);
    Var kh = heads_ == 1 ? k : g.SliceCols(k, h * head_dim, head_dim);
    Var vh = heads_ == 1 ? v : g.SliceCols(v, h * head_dim, head_dim);
    Var scores = g.Scale(g.MatMulT(qh, kh), scale);
    Var weights = g.SoftmaxRows(scores, mask);
    outs.push_back(g.MatMul(weights, vh));
  }
  Var merged = heads_ == 1 ? outs[0] : g.ConcatCols(outs);
  return o_.Forward(g, merged);
}

FeedForward::FeedForward(ParameterStore &store, const std::string &name,
                         int dim, int hidden, std::mt19937_64 &rng) {
  up_ = Linear(store, name + ".up", dim, hidden, rng);
  down_ = Linear(store, name + ".down", hidden, dim, rng);
}

Var FeedForward::Forward(Graph &g, Var x) const {
  return down_.Forward(g, g.Gelu(up_.Forward(g, x)));
}

Var PassOptions::MaybeDropout(Graph &g, Var x) const {
  if (!train || dropout <= 0.0 || rng == nullptr) return x;
  return g.Dropout(x, dropout, *rng);
}

EncoderLayer::EncoderLayer(ParameterStore &store, const std::string &name,
                           int dim, int heads, int hidden,
                           std::mt19937_64 &rng) {
  self_attn_ = MultiHeadAttention(store, name + ".self_attn", dim, heads, rng);
  attn_norm_ = LayerNormLayer(store, name + ".self_attn_norm", dim);
  ffn_ = FeedForward(store, name + ".ffn", dim, hidden, rng);
  ffn_norm_ = LayerNormLayer(store, name + ".ffn_norm", dim);
}

Var EncoderLayer::Forward(Graph &g, Var x, const PassOptions &opts) const {
  Var a = opts.MaybeDropout(g, self_attn_.Forward(g, x, x, nullptr));
  x = attn_norm_.Forward(g, g.Add(x, a));
  Var f = opts.MaybeDropout(g, ffn_.Forward(g, x));
  return ffn_norm_.Forward(g, g.Add(x, f));
}

DecoderLayer::DecoderLayer(ParameterStore &store, const std::string &name,
                           int dim, int heads, int hidden,
                           std::mt19937_64 &rng) {
  self_attn_ = MultiHeadAttention(store, name + ".self_attn", dim, heads, rng);
  self_norm_ = LayerNormLayer(store, name + ".self_attn_norm", dim);
  cross_attn_ = MultiHeadAttention(store, name + ".cross_attn", dim, heads, rng);
  cross_norm_ = LayerNormLayer(store, name + ".cross_attn_norm", dim);
  ffn_ = FeedForward(store, name + ".ffn", dim, hidden, rng);
  ffn_norm_ = LayerNormLayer(store, name + ".ffn_norm", dim);
}

Var DecoderLayer::Forward(Graph &g, Var x, Var memory,
                          const Matrix &causal_mask,
                          const PassOptions &opts) const {
  Var a = opts.MaybeDropout(g, self_attn_.Forward(g, x, x, &causal_mask));
  x = self_norm_.Forward(g, g.Add(x, a));
  Var c = opts.MaybeDropout(g, cross_attn_.Forward(g, x, memory, nullptr));
  x = cross_norm_.Forward(g, g.Add(x, c));
  Var f = opts.MaybeDropout(g, ffn_.Forward(g, x));
  return ffn_norm_.Forward(g, g.Add(x, f));
}

}  // namespace toxexplain::nn
