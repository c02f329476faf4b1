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

#ifndef TOXEXPLAIN_NN_LAYERS_H_
#define TOXEXPLAIN_NN_LAYERS_H_

#include <random>
#include <string>
#include <vector>

#include "toxexplain/nn/graph.h"
#include "toxexplain/nn/parameters.h"

namespace toxexplain::nn {

// Standard deviation for weight init (BART uses 0.02).
inline constexpr double kInitStd = 0.02;

// y = x W + b, W: in x out.
class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore &store, const std::string &name, int in, int out,
         std::mt19937_64 &rng, bool bias = true, double init_std = kInitStd);

  Var Forward(Graph &g, Var x) const;
  Parameter *weight() const { return weight_; }
  Parameter *bias() const { return bias_; }
  int in() const { return in_; }
  int out() const { return out_; }

 private:
  Parameter *weight_ = nullptr;
  Parameter *bias_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParameterStore &store, const std::string &name, int dim);
  Var Forward(Graph &g, Var x) const;

 private:
  Parameter *gain_ = nullptr;
  Parameter *bias_ = nullptr;
};

// Additive causal mask: 0 on and below the diagonal, -1e9 above.
Matrix CausalMask(int n);

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterStore &store, const std::string &name, int dim,
                     int heads, std::mt19937_64 &rng);

  // Queries come from `query`, keys and values from `memory`.
  Var Forward(Graph &g, Var query, Var memory, const Matrix *mask) const;

 private:
  Linear q_, k_, v_, o_;
  int dim_ = 0;
  int heads_ = 1;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterStore &store, const std::string &name, int dim,
              int hidden, std::mt19937_64 &rng);
  Var Forward(Graph &g, Var x) const;

 private:
  Linear up_, down_;
};

// Per-forward-pass options shared by transformer blocks.
struct PassOptions {
  bool train = false;
  double dropout = 0.0;
  std::mt19937_64 *rng = nullptr;

  Var MaybeDropout(Graph &g, Var x) const;
};

// Post-LN encoder block: x = LN(x + SelfAttn(x)); x = LN(x + FFN(x)).
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParameterStore &store, const std::string &name, int dim,
               int heads, int hidden, std::mt19937_64 &rng);
  Var Forward(Graph &g, Var x, const PassOptions &opts) const;

 private:
  MultiHeadAttention self_attn_;
  LayerNormLayer attn_norm_;
  FeedForward ffn_;
  LayerNormLayer ffn_norm_;
};

// Post-LN decoder block with causal self-attention and cross-attention.
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(ParameterStore &store, const std::string &name, int dim,
               int heads, int hidden, std::mt19937_64 &rng);
  Var Forward(Graph &g, Var x, Var memory, const Matrix &causal_mask,
              const PassOptions &opts) const;

 private:
  MultiHeadAttention self_attn_;
  LayerNormLayer self_norm_;
  MultiHeadAttention cross_attn_;
  LayerNormLayer cross_norm_;
  FeedForward ffn_;
  LayerNormLayer ffn_norm_;
};

}  // namespace toxexplain::nn

#endif  // TOXEXPLAIN_NN_LAYERS_H_
