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

#include "toxexplain/generator/coda.h"

#include <cmath>

#include "toxexplain/common/errors.h"

namespace toxexplain::generator {

AffinityFn NegativeL1Affinity(double alpha) {
  return [alpha](nn::Graph &g, nn::Var q, nn::Var k) {
    return g.Scale(g.NegL1Distance(q, k), alpha);
  };
}

nn::Var CodaAttention(nn::Graph &g, nn::Var q, nn::Var k, nn::Var v,
                      const AffinityFn &affinity) {
  const nn::Matrix &qv = g.value(q);
  const nn::Matrix &kv = g.value(k);
  const nn::Matrix &vv = g.value(v);
  if (qv.cols() != kv.cols() || kv.rows() != vv.rows()) {
    throw ShapeError("CodaAttention: query " + std::to_string(qv.rows()) + "x" +
                     std::to_string(qv.cols()) + ", key " +
                     std::to_string(kv.rows()) + "x" + std::to_string(kv.cols()) +
                     ", value " + std::to_string(vv.rows()) + "x" +
                     std::to_string(vv.cols()) + " do not conform");
  }
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(kv.cols()));
  nn::Var similarity = g.Tanh(g.Scale(g.MatMulT(q, k), inv_scale));
  nn::Var gate = g.Sigmoid(g.Scale(affinity(g, q, k), inv_scale));
  return g.MatMul(g.Mul(similarity, gate), v);
}

}  // namespace toxexplain::generator
