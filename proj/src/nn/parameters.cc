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

#include "toxexplain/nn/parameters.h"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "toxexplain/common/errors.h"

namespace toxexplain::nn {

namespace {

constexpr char kMagic[8] = {'T', 'X', 'N', 'N', 'W', 'T', 'S', '1'};

template <typename T>
void WritePod(std::ostream &out, const T &value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream &in) {
  T value{};
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in) throw LoadError("truncated weights file");
  return value;
}

}  // namespace

Parameter::Parameter(std::string name, Matrix value)
    : name_(std::move(name)), value_(std::move(value)) {
  grad_ = Matrix::Zero(value_.rows(), value_.cols());
}

Parameter *ParameterStore::Create(const std::string &name, Matrix init) {
  if (Contains(name)) throw PreconditionError("duplicate parameter " + name);
  params_.push_back(std::make_unique<Parameter>(name, std::move(init)));
  return params_.back().get();
}

Parameter *ParameterStore::Get(const std::string &name) const {
  for (const auto &p : params_) {
    if (p->name() == name) return p.get();
  }
  throw PreconditionError("no parameter named " + name);
}

bool ParameterStore::Contains(const std::string &name) const {
  for (const auto &p : params_) {
    if (p->name() == name) return true;
  }
  return false;
}

size_t ParameterStore::ScalarCount() const {
  size_t n = 0;
  for (const auto &p : params_) n += static_cast<size_t>(p->value().size());
  return n;
}

void ParameterStore::ZeroGrad() {
  for (auto &p : params_) p->ZeroGrad();
}

double ParameterStore::GradNorm() const {
  double ss = 0.0;
  for (const auto &p : params_) ss += p->grad().squaredNorm();
  return std::sqrt(ss);
}

void ParameterStore::ScaleGrads(double factor) {
  for (auto &p : params_) p->grad() *= factor;
}

bool ParameterStore::GradsFinite() const {
  for (const auto &p : params_) {
    if (!p->grad().allFinite()) return false;
  }
  return true;
}

std::vector<Matrix> ParameterStore::Snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto &p : params_) out.push_back(p->value());
  return out;
}

void ParameterStore::Restore(const std::vector<Matrix> &snapshot) {
  if (snapshot.size() != params_.size()) {
    throw PreconditionError("snapshot does not match parameter store");
  }
  for (size_t i = 0; i < params_.size(); ++i) params_[i]->value() = snapshot[i];
}

void ParameterStore::Save(const std::filesystem::path &path) const {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    WritePod<uint32_t>(out, static_cast<uint32_t>(params_.size()));
    for (const auto &p : params_) {
      WritePod<uint32_t>(out, static_cast<uint32_t>(p->name().size()));
      out.write(p->name().data(), static_cast<std::streamsize>(p->name().size()));
      WritePod<uint32_t>(out, static_cast<uint32_t>(p->value().rows()));
      WritePod<uint32_t>(out, static_cast<uint32_t>(p->value().cols()));
      out.write(reinterpret_cast<const char *>(p->value().data()),
                static_cast<std::streamsize>(p->value().size() * sizeof(double)));
    }
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void ParameterStore::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open weights " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + sizeof(magic), kMagic)) {
    throw LoadError(path.string() + ": not a weights file");
  }
  uint32_t count = ReadPod<uint32_t>(in);
  if (count != params_.size()) {
    throw LoadError(path.string() + ": holds " + std::to_string(count) +
                    " parameters, model expects " +
                    std::to_string(params_.size()));
  }
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t len = ReadPod<uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    uint32_t rows = ReadPod<uint32_t>(in);
    uint32_t cols = ReadPod<uint32_t>(in);
    if (!Contains(name)) {
      throw LoadError(path.string() + ": unexpected parameter " + name);
    }
    Parameter *p = Get(name);
    if (p->value().rows() != rows || p->value().cols() != cols) {
      throw ShapeError(path.string() + ": parameter " + name + " is " +
                       std::to_string(rows) + "x" + std::to_string(cols) +
                       ", model expects " + std::to_string(p->value().rows()) +
                       "x" + std::to_string(p->value().cols()));
    }
    in.read(reinterpret_cast<char *>(p->value().data()),
            static_cast<std::streamsize>(p->value().size() * sizeof(double)));
    if (!in) throw LoadError(path.string() + ": truncated at " + name);
  }
}

Matrix NormalInit(int rows, int cols, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Matrix ZerosInit(int rows, int cols) { return Matrix::Zero(rows, cols); }

Matrix OnesInit(int rows, int cols) { return Matrix::Ones(rows, cols); }

}  // namespace toxexplain::nn
