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

#include "toxexplain/nn/graph.h"

#include <cmath>
#include <string>

#include "toxexplain/common/errors.h"

namespace toxexplain::nn {

namespace {

std::string ShapeOf(const Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

Var Graph::Push(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), nullptr, nullptr});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Graph::SetBackward(Var v, std::function<void()> fn) {
  if (requires_grad_) nodes_[v.id].backward = std::move(fn);
}

Matrix &Graph::GradSink(int id) {
  Node &n = nodes_[id];
  if (n.param != nullptr) return n.param->grad();
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::CheckShape(bool ok, const char *op, Var a, Var b) const {
  if (!ok) {
    throw ShapeError(std::string(op) + ": shapes " + ShapeOf(value(a)) +
                     " and " + ShapeOf(value(b)) + " do not conform");
  }
}

Var Graph::Constant(Matrix value) { return Push(std::move(value)); }

Var Graph::Param(Parameter *param) {
  auto it = param_nodes_.find(param);
  if (it != param_nodes_.end()) return Var{it->second};
  nodes_.push_back(Node{Matrix(), Matrix(), param, nullptr});
  int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(param, id);
  return Var{id};
}

const Matrix &Graph::value(Var v) const {
  const Node &n = nodes_.at(static_cast<size_t>(v.id));
  return n.param != nullptr ? n.param->value() : n.value;
}

const Matrix &Graph::grad(Var v) const {
  const Node &n = nodes_.at(static_cast<size_t>(v.id));
  return n.param != nullptr ? n.param->grad() : n.grad;
}

Var Graph::MatMul(Var a, Var b) {
  CheckShape(value(a).cols() == value(b).rows(), "MatMul", a, b);
  Var out = Push(value(a) * value(b));
  SetBackward(out, [this, a, b, out]() {
    const Matrix &g = Grad(out.id);
    GradSink(a.id).noalias() += g * value(b).transpose();
    GradSink(b.id).noalias() += value(a).transpose() * g;
  });
  return out;
}

Var Graph::MatMulT(Var a, Var b) {
  CheckShape(value(a).cols() == value(b).cols(), "MatMulT", a, b);
  Var out = Push(value(a) * value(b).transpose());
  SetBackward(out, [this, a, b, out]() {
    const Matrix &g = Grad(out.id);
    GradSink(a.id).noalias() += g * value(b);
    GradSink(b.id).noalias() += g.transpose() * value(a);
  });
  return out;
}

Var Graph::Add(Var a, Var b) {
  CheckShape(value(a).rows() == value(b).rows() &&
                 value(a).cols() == value(b).cols(),
             "Add", a, b);
  Var out = Push(value(a) + value(b));
  SetBackward(out, [this, a, b, out]() {
    GradSink(a.id) += Grad(out.id);
    GradSink(b.id) += Grad(out.id);
  });
  return out;
}

Var Graph::Sub(Var a, Var b) {
  CheckShape(value(a).rows() == value(b).rows() &&
                 value(a).cols() == value(b).cols(),
             "Sub", a, b);
  Var out = Push(value(a) - value(b));
  SetBackward(out, [this, a, b, out]() {
    GradSink(a.id) += Grad(out.id);
    GradSink(b.id) -= Grad(out.id);
  });
  return out;
}

Var Graph::AddRow(Var a, Var row) {
  CheckShape(value(row).rows() == 1 && value(row).cols() == value(a).cols(),
             "AddRow", a, row);
  Matrix v = value(a);
  v.rowwise() += value(row).row(0);
  Var out = Push(std::move(v));
  SetBackward(out, [this, a, row, out]() {
    GradSink(a.id) += Grad(out.id);
    GradSink(row.id) += Grad(out.id).colwise().sum();
  });
  return out;
}

Var Graph::Mul(Var a, Var b) {
  CheckShape(value(a).rows() == value(b).rows() &&
                 value(a).cols() == value(b).cols(),
             "Mul", a, b);
  Var out = Push(value(a).cwiseProduct(value(b)));
  SetBackward(out, [this, a, b, out]() {
    GradSink(a.id) += Grad(out.id).cwiseProduct(value(b));
    GradSink(b.id) += Grad(out.id).cwiseProduct(value(a));
  });
  return out;
}

Var Graph::Scale(Var a, double factor) {
  Var out = Push(value(a) * factor);
  SetBackward(out, [this, a, out, factor]() {
    GradSink(a.id) += Grad(out.id) * factor;
  });
  return out;
}

Var Graph::Tanh(Var a) {
  Var out = Push(value(a).array().tanh().matrix());
  SetBackward(out, [this, a, out]() {
    const Matrix &y = value(out);
    GradSink(a.id).array() +=
        Grad(out.id).array() * (1.0 - y.array().square());
  });
  return out;
}

Var Graph::Sigmoid(Var a) {
  Matrix y = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  Var out = Push(std::move(y));
  SetBackward(out, [this, a, out]() {
    const Matrix &y = value(out);
    GradSink(a.id).array() +=
        Grad(out.id).array() * y.array() * (1.0 - y.array());
  });
  return out;
}

Var Graph::Relu(Var a) {
  Var out = Push(value(a).cwiseMax(0.0));
  SetBackward(out, [this, a, out]() {
    GradSink(a.id).array() +=
        Grad(out.id).array() * (value(a).array() > 0.0).cast<double>();
  });
  return out;
}

Var Graph::Gelu(Var a) {
  const Matrix &x = value(a);
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x.data()[i];
    y.data()[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  Var out = Push(std::move(y));
  SetBackward(out, [this, a, out]() {
    const Matrix &x = value(a);
    const Matrix &g = Grad(out.id);
    Matrix &sink = GradSink(a.id);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double v = x.data()[i];
      double d = 0.5 * (1.0 + std::erf(v * kInvSqrt2)) +
                 v * kInvSqrt2Pi * std::exp(-0.5 * v * v);
      sink.data()[i] += g.data()[i] * d;
    }
  });
  return out;
}

Var Graph::SoftmaxRows(Var a, const Matrix *mask) {
  Matrix z = value(a);
  if (mask != nullptr) {
    if (mask->rows() != z.rows() || mask->cols() != z.cols()) {
      throw ShapeError("SoftmaxRows: mask " + ShapeOf(*mask) +
                       " does not match input " + ShapeOf(z));
    }
    z += *mask;
  }
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp().matrix();
    z.row(r) /= z.row(r).sum();
  }
  Var out = Push(std::move(z));
  SetBackward(out, [this, a, out]() {
    const Matrix &y = value(out);
    const Matrix &g = Grad(out.id);
    Eigen::VectorXd dot = (g.cwiseProduct(y)).rowwise().sum();
    Matrix d = g;
    d.colwise() -= dot;
    GradSink(a.id) += d.cwiseProduct(y);
  });
  return out;
}

Var Graph::LayerNorm(Var x, Var gain, Var bias, double eps) {
  const Matrix &in = value(x);
  const Eigen::Index n = in.cols();
  if (value(gain).cols() != n || value(bias).cols() != n) {
    throw ShapeError("LayerNorm: gain/bias width does not match input " +
                     ShapeOf(in));
  }
  Matrix xhat(in.rows(), n);
  Eigen::VectorXd inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double mu = in.row(r).mean();
    double var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Matrix y = xhat;
  y.array().rowwise() *= value(gain).row(0).array();
  y.rowwise() += value(bias).row(0);
  Var out = Push(std::move(y));
  SetBackward(out, [this, x, gain, bias, out, xhat = std::move(xhat),
                    inv_std = std::move(inv_std)]() {
    const Matrix &g = Grad(out.id);
    const double cols = static_cast<double>(g.cols());
    GradSink(gain.id) += g.cwiseProduct(xhat).colwise().sum();
    GradSink(bias.id) += g.colwise().sum();
    Matrix dxhat = g;
    dxhat.array().rowwise() *= value(gain).row(0).array();
    Matrix &sink = GradSink(x.id);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      double sum_d = dxhat.row(r).sum();
      double sum_dx = dxhat.row(r).dot(xhat.row(r));
      sink.row(r).array() += (inv_std(r) / cols) *
                             (cols * dxhat.row(r).array() - sum_d -
                              xhat.row(r).array() * sum_dx);
    }
  });
  return out;
}

Var Graph::Dropout(Var a, double rate, std::mt19937_64 &rng) {
  if (rate <= 0.0) return a;
  const Matrix &x = value(a);
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(rng) ? scale : 0.0;
  }
  Var out = Push(x.cwiseProduct(mask));
  SetBackward(out, [this, a, out, mask = std::move(mask)]() {
    GradSink(a.id) += Grad(out.id).cwiseProduct(mask);
  });
  return out;
}

Var Graph::Gather(Var table, std::span<const int> ids) {
  const Matrix &t = value(table);
  Matrix rows(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= t.rows()) {
      throw ShapeError("Gather: index " + std::to_string(ids[i]) +
                       " outside table of " + std::to_string(t.rows()) +
                       " rows");
    }
    rows.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
  }
  Var out = Push(std::move(rows));
  std::vector<int> index(ids.begin(), ids.end());
  SetBackward(out, [this, table, out, index = std::move(index)]() {
    const Matrix &g = Grad(out.id);
    Matrix &sink = GradSink(table.id);
    for (size_t i = 0; i < index.size(); ++i) {
      sink.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
    }
  });
  return out;
}

Var Graph::ConcatRows(const std::vector<Var> &parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no inputs");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    CheckShape(value(p).cols() == cols, "ConcatRows", parts[0], p);
    rows += value(p).rows();
  }
  Matrix v(rows, cols);
  Eigen::Index offset = 0;
  for (Var p : parts) {
    v.middleRows(offset, value(p).rows()) = value(p);
    offset += value(p).rows();
  }
  Var out = Push(std::move(v));
  SetBackward(out, [this, parts, out]() {
    Eigen::Index offset = 0;
    for (Var p : parts) {
      Eigen::Index r = value(p).rows();
      GradSink(p.id) += Grad(out.id).middleRows(offset, r);
      offset += r;
    }
  });
  return out;
}

Var Graph::ConcatCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw ShapeError("ConcatCols: no inputs");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    CheckShape(value(p).rows() == rows, "ConcatCols", parts[0], p);
    cols += value(p).cols();
  }
  Matrix v(rows, cols);
  Eigen::Index offset = 0;
  for (Var p : parts) {
    v.middleCols(offset, value(p).cols()) = value(p);
    offset += value(p).cols();
  }
  Var out = Push(std::move(v));
  SetBackward(out, [this, parts, out]() {
    Eigen::Index offset = 0;
    for (Var p : parts) {
      Eigen::Index c = value(p).cols();
      GradSink(p.id) += Grad(out.id).middleCols(offset, c);
      offset += c;
    }
  });
  return out;
}

Var Graph::SliceCols(Var a, int start, int count) {
  const Matrix &x = value(a);
  if (start < 0 || count < 0 || start + count > x.cols()) {
    throw ShapeError("SliceCols: [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + ShapeOf(x));
  }
  Var out = Push(x.middleCols(start, count));
  SetBackward(out, [this, a, out, start, count]() {
    GradSink(a.id).middleCols(start, count) += Grad(out.id);
  });
  return out;
}

Var Graph::MeanRows(Var a) {
  const Matrix &x = value(a);
  if (x.rows() == 0) throw ShapeError("MeanRows: empty input");
  Var out = Push(x.colwise().mean());
  SetBackward(out, [this, a, out]() {
    Matrix &sink = GradSink(a.id);
    const double inv = 1.0 / static_cast<double>(sink.rows());
    sink.rowwise() += Grad(out.id).row(0) * inv;
  });
  return out;
}

Var Graph::RepeatRows(Var row, int times) {
  const Matrix &x = value(row);
  if (x.rows() != 1) throw ShapeError("RepeatRows: expects a single row, got " + ShapeOf(x));
  Var out = Push(x.replicate(times, 1));
  SetBackward(out, [this, row, out]() {
    GradSink(row.id) += Grad(out.id).colwise().sum();
  });
  return out;
}

Var Graph::NegL1Distance(Var q, Var k) {
  const Matrix &qv = value(q);
  const Matrix &kv = value(k);
  CheckShape(qv.cols() == kv.cols(), "NegL1Distance", q, k);
  Matrix d(qv.rows(), kv.rows());
  for (Eigen::Index i = 0; i < qv.rows(); ++i) {
    for (Eigen::Index j = 0; j < kv.rows(); ++j) {
      d(i, j) = -(qv.row(i) - kv.row(j)).cwiseAbs().sum();
    }
  }
  Var out = Push(std::move(d));
  SetBackward(out, [this, q, k, out]() {
    const Matrix &qv = value(q);
    const Matrix &kv = value(k);
    const Matrix &g = Grad(out.id);
    Matrix &qs = GradSink(q.id);
    Matrix &ks = GradSink(k.id);
    for (Eigen::Index i = 0; i < qv.rows(); ++i) {
      for (Eigen::Index j = 0; j < kv.rows(); ++j) {
        auto sign = (qv.row(i) - kv.row(j)).array().sign().matrix();
        qs.row(i) -= g(i, j) * sign;
        ks.row(j) += g(i, j) * sign;
      }
    }
  });
  return out;
}

Var Graph::CrossEntropy(Var logits, std::span<const int> targets) {
  const Matrix &z = value(logits);
  if (static_cast<size_t>(z.rows()) != targets.size()) {
    throw ShapeError("CrossEntropy: " + std::to_string(z.rows()) +
                     " rows of logits but " + std::to_string(targets.size()) +
                     " targets");
  }
  Matrix probs(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    int t = targets[static_cast<size_t>(r)];
    if (t < 0 || t >= z.cols()) {
      throw ShapeError("CrossEntropy: target " + std::to_string(t) +
                       " outside vocabulary of " + std::to_string(z.cols()));
    }
    double m = z.row(r).maxCoeff();
    probs.row(r) = (z.row(r).array() - m).exp().matrix();
    double sum = probs.row(r).sum();
    probs.row(r) /= sum;
    loss -= z(r, t) - m - std::log(sum);
  }
  const double n = static_cast<double>(z.rows());
  Matrix v(1, 1);
  v(0, 0) = loss / n;
  Var out = Push(std::move(v));
  std::vector<int> tgt(targets.begin(), targets.end());
  SetBackward(out, [this, logits, out, probs = std::move(probs),
                    tgt = std::move(tgt), n]() {
    const double g = Grad(out.id)(0, 0) / n;
    Matrix &sink = GradSink(logits.id);
    sink += probs * g;
    for (size_t r = 0; r < tgt.size(); ++r) {
      sink(static_cast<Eigen::Index>(r), tgt[r]) -= g;
    }
  });
  return out;
}

Var Graph::MseLoss(Var prediction, const Matrix &target) {
  const Matrix &p = value(prediction);
  if (p.rows() != target.rows() || p.cols() != target.cols()) {
    throw ShapeError("MseLoss: prediction " + ShapeOf(p) + " vs target " +
                     ShapeOf(target));
  }
  Matrix diff = p - target;
  const double n = static_cast<double>(p.size());
  Matrix v(1, 1);
  v(0, 0) = diff.squaredNorm() / n;
  Var out = Push(std::move(v));
  SetBackward(out, [this, prediction, out, diff = std::move(diff), n]() {
    GradSink(prediction.id) += diff * (2.0 * Grad(out.id)(0, 0) / n);
  });
  return out;
}

Var Graph::Sum(Var a) {
  Matrix v(1, 1);
  v(0, 0) = value(a).sum();
  Var out = Push(std::move(v));
  SetBackward(out, [this, a, out]() {
    GradSink(a.id).array() += Grad(out.id)(0, 0);
  });
  return out;
}

void Graph::Backward(Var loss) {
  if (!requires_grad_) {
    throw PreconditionError("Backward on a graph built without gradients");
  }
  if (value(loss).size() != 1) {
    throw ShapeError("Backward: loss must be 1x1, got " + ShapeOf(value(loss)));
  }
  GradSink(loss.id)(0, 0) += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node &n = nodes_[i];
    if (n.param != nullptr || !n.backward || n.grad.size() == 0) continue;
    n.backward();
  }
}

}  // namespace toxexplain::nn
