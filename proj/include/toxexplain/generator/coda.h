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

#ifndef TOXEXPLAIN_GENERATOR_CODA_H_
#define TOXEXPLAIN_GENERATOR_CODA_H_

#include <functional>
#include <string>

#include "toxexplain/nn/graph.h"

namespace toxexplain::generator {

// Pairwise affinity between query rows and key rows (n x m).
using AffinityFn = std::function<nn::Var(nn::Graph &, nn::Var q, nn::Var k)>;

// -alpha * L1 distance between rows.
AffinityFn NegativeL1Affinity(double alpha);

// Compositional de-attention:
//   (tanh(Q K^T / sqrt(dk)) * sigmoid(affinity(Q, K) / sqrt(dk))) V
// with dk the key width. Q: n x dk, K: m x dk, V: m x dv.
nn::Var CodaAttention(nn::Graph &g, nn::Var q, nn::Var k, nn::Var v,
                      const AffinityFn &affinity);

}  // namespace toxexplain::generator

#endif  // TOXEXPLAIN_GENERATOR_CODA_H_
