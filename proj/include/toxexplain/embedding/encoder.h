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

#ifndef TOXEXPLAIN_EMBEDDING_ENCODER_H_
#define TOXEXPLAIN_EMBEDDING_ENCODER_H_

#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "toxexplain/common/io.h"

namespace toxexplain::embedding {

using Vector = Eigen::VectorXd;

// Maps tokens and sentences to fixed-width vectors.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  // True when every embedding is entrywise nonnegative, which confines
  // cosine similarities to [0, 1].
  virtual bool nonnegative() const = 0;

  // Zero vector for tokens the encoder cannot represent.
  virtual Vector EmbedToken(const std::string &token) const = 0;
  // Normalized sum of the normalized token vectors.
  virtual Vector EmbedSentence(const std::string &text) const;
};

// Character n-gram counts hashed into `dim` buckets, L2-normalized.
class HashedNgramEncoder : public TextEncoder {
 public:
  explicit HashedNgramEncoder(int dim = 512, int min_n = 3, int max_n = 5);

  std::string name() const override;
  int dim() const override { return dim_; }
  bool nonnegative() const override { return true; }
  Vector EmbedToken(const std::string &token) const override;

 private:
  int dim_;
  int min_n_;
  int max_n_;
};

// Word vectors from a whitespace-separated text file ("word v1 v2 ...").
class StaticVectorEncoder : public TextEncoder {
 public:
  static std::unique_ptr<StaticVectorEncoder> Load(const std::filesystem::path &path);

  std::string name() const override { return name_; }
  int dim() const override { return dim_; }
  bool nonnegative() const override { return nonnegative_; }
  Vector EmbedToken(const std::string &token) const override;

 private:
  std::string name_;
  int dim_ = 0;
  bool nonnegative_ = true;
  std::unordered_map<std::string, Vector> vectors_;
};

// 0 when either vector is zero.
double Cosine(const Vector &a, const Vector &b);

// {"type": "hashed_ngram", "dim": 512, "min_n": 3, "max_n": 5} or
// {"type": "static", "path": "..."}.
std::unique_ptr<TextEncoder> MakeEncoder(const Json &config);

}  // namespace toxexplain::embedding

#endif  // TOXEXPLAIN_EMBEDDING_ENCODER_H_
