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

#ifndef TOXEXPLAIN_NN_PARAMETERS_H_
#define TOXEXPLAIN_NN_PARAMETERS_H_

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace toxexplain::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A trainable matrix and its accumulated gradient.
class Parameter {
 public:
  Parameter(std::string name, Matrix value);

  const std::string &name() const { return name_; }
  Matrix &value() { return value_; }
  const Matrix &value() const { return value_; }
  Matrix &grad() { return grad_; }
  const Matrix &grad() const { return grad_; }
  void ZeroGrad() { grad_.setZero(); }

 private:
  std::string name_;
  Matrix value_;
  Matrix grad_;
};

// Owns every parameter of a model, in creation order. Creation order is the
// serialization order and the optimizer state order.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore &) = delete;
  ParameterStore &operator=(const ParameterStore &) = delete;

  Parameter *Create(const std::string &name, Matrix init);
  Parameter *Get(const std::string &name) const;
  bool Contains(const std::string &name) const;

  const std::vector<std::unique_ptr<Parameter>> &all() const { return params_; }
  size_t ScalarCount() const;

  void ZeroGrad();
  double GradNorm() const;
  void ScaleGrads(double factor);
  bool GradsFinite() const;

  // Snapshot of all values, used to restore a last-good state.
  std::vector<Matrix> Snapshot() const;
  void Restore(const std::vector<Matrix> &snapshot);

  // Binary format: magic, count, then (name, rows, cols, row-major doubles)
  // per parameter. Load requires every stored name to exist with the same
  // shape and every parameter to be present in the file.
  void Save(const std::filesystem::path &path) const;
  void Load(const std::filesystem::path &path);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

Matrix NormalInit(int rows, int cols, double stddev, std::mt19937_64 &rng);
Matrix ZerosInit(int rows, int cols);
Matrix OnesInit(int rows, int cols);

}  // namespace toxexplain::nn

#endif  // TOXEXPLAIN_NN_PARAMETERS_H_
