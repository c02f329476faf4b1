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

#ifndef TOXEXPLAIN_NN_GRAPH_H_
#define TOXEXPLAIN_NN_GRAPH_H_

#include <functional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "toxexplain/nn/parameters.h"

namespace toxexplain::nn {

// Handle to a node in a Graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Define-by-run reverse-mode differentiation over row-major matrices.
//
// Nodes are appended in evaluation order, so Backward() walks them in
// reverse. Gradients flowing into parameter nodes accumulate directly into
// Parameter::grad(), which lets a caller sum gradients over several graphs
// (one per training example) before an optimizer step.
//
// A graph built with requires_grad = false records values only.
class Graph {
 public:
  explicit Graph(bool requires_grad = true) : requires_grad_(requires_grad) {}
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  Var Constant(Matrix value);
  // Each parameter maps to a single node per graph.
  Var Param(Parameter *param);

  const Matrix &value(Var v) const;
  // Gradient of a non-parameter node after Backward(); empty if none flowed.
  const Matrix &grad(Var v) const;
  double Scalar(Var v) const { return value(v)(0, 0); }
  size_t size() const { return nodes_.size(); }

  Var MatMul(Var a, Var b);   // a * b
  Var MatMulT(Var a, Var b);  // a * b^T
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var AddRow(Var a, Var row);  // row (1 x n) broadcast over a's rows
  Var Mul(Var a, Var b);       // elementwise
  Var Scale(Var a, double factor);

  Var Tanh(Var a);
  Var Sigmoid(Var a);
  Var Relu(Var a);
  Var Gelu(Var a);

  // Row-wise softmax of (a + mask). The additive mask is constant.
  Var SoftmaxRows(Var a, const Matrix *mask = nullptr);
  Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
  Var Dropout(Var a, double rate, std::mt19937_64 &rng);

  Var Gather(Var table, std::span<const int> ids);
  Var ConcatRows(const std::vector<Var> &parts);
  Var ConcatCols(const std::vector<Var> &parts);
  Var SliceCols(Var a, int start, int count);
  Var MeanRows(Var a);               // -> 1 x cols
  Var RepeatRows(Var row, int times);  // 1 x c -> times x c

  // D(i, j) = -sum_c |q(i, c) - k(j, c)|.
  Var NegL1Distance(Var q, Var k);

  // Mean negative log-likelihood of targets under row-wise softmax(logits).
  Var CrossEntropy(Var logits, std::span<const int> targets);
  // Mean squared error over all entries.
  Var MseLoss(Var prediction, const Matrix &target);
  Var Sum(Var a);

  // Seeds d(loss)/d(loss) = 1 and propagates to every node.
  void Backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Parameter *param = nullptr;
    std::function<void()> backward;
  };

  Var Push(Matrix value);
  void SetBackward(Var v, std::function<void()> fn);
  const Matrix &Grad(int id) const { return nodes_[id].grad; }
  bool HasGrad(int id) const { return nodes_[id].grad.size() > 0; }
  Matrix &GradSink(int id);  // zero-initialized on first use
  void CheckShape(bool ok, const char *op, Var a, Var b) const;

  bool requires_grad_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter *, int> param_nodes_;
};

}  // namespace toxexplain::nn

#endif  // TOXEXPLAIN_NN_GRAPH_H_
