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

#include "toxexplain/embedding/encoder.h"

#include <sstream>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::embedding {
namespace {

Vector Normalized(Vector v) {
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

}  // namespace

Vector TextEncoder::EmbedSentence(const std::string &text) const {
  Vector sum = Vector::Zero(dim());
  for (const std::string &tok : SplitWhitespace(text)) {
    sum += Normalized(EmbedToken(tok));
  }
  return Normalized(std::move(sum));
}

HashedNgramEncoder::HashedNgramEncoder(int dim, int min_n, int max_n)
    : dim_(dim), min_n_(min_n), max_n_(max_n) {
  if (dim <= 0 || min_n < 1 || max_n < min_n) {
    throw PreconditionError("hashed encoder needs dim > 0 and 1 <= min_n <= max_n");
  }
}

std::string HashedNgramEncoder::name() const {
  return "hashed_ngram(dim=" + std::to_string(dim_) + ",n=" +
         std::to_string(min_n_) + "-" + std::to_string(max_n_) + ")";
}

Vector HashedNgramEncoder::EmbedToken(const std::string &token) const {
  Vector v = Vector::Zero(dim_);
  if (token.empty()) return v;
  const std::string padded = "<" + token + ">";
  // The whole token gets its own feature so identical tokens always
  // dominate partial overlaps.
  v[Fnv1a64(padded) % dim_] += 1.0;
  for (int n = min_n_; n <= max_n_; ++n) {
    if (static_cast<size_t>(n) > padded.size()) break;
    for (size_t i = 0; i + n <= padded.size(); ++i) {
      v[Fnv1a64(std::string_view(padded).substr(i, n)) % dim_] += 1.0;
    }
  }
  return Normalized(std::move(v));
}

std::unique_ptr<StaticVectorEncoder> StaticVectorEncoder::Load(
    const std::filesystem::path &path) {
  std::string content = ReadFile(path);
  auto enc = std::unique_ptr<StaticVectorEncoder>(new StaticVectorEncoder());
  enc->name_ = "static(" + path.filename().string() + ")";
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    // word2vec text files start with a "count dim" header.
    if (line_no == 1 && fields.size() == 2) continue;
    const int dim = static_cast<int>(fields.size()) - 1;
    if (enc->dim_ == 0) enc->dim_ = dim;
    if (dim != enc->dim_ || dim <= 0) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(enc->dim_) + " components, got " +
                      std::to_string(dim));
    }
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
      try {
        v[i] = std::stod(fields[i + 1]);
      } catch (const std::exception &) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) +
                        ": bad number '" + fields[i + 1] + "'");
      }
    }
    if ((v.array() < 0.0).any()) enc->nonnegative_ = false;
    enc->vectors_.emplace(fields[0], std::move(v));
  }
  if (enc->vectors_.empty()) throw LoadError(path.string() + ": no vectors");
  return enc;
}

Vector StaticVectorEncoder::EmbedToken(const std::string &token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? Vector::Zero(dim_) : it->second;
}

double Cosine(const Vector &a, const Vector &b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine of vectors with " + std::to_string(a.size()) +
                     " and " + std::to_string(b.size()) + " components");
  }
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::unique_ptr<TextEncoder> MakeEncoder(const Json &config) {
  const std::string type = config.value("type", "hashed_ngram");
  if (type == "hashed_ngram") {
    return std::make_unique<HashedNgramEncoder>(config.value("dim", 512),
                                                config.value("min_n", 3),
                                                config.value("max_n", 5));
  }
  if (type == "static") {
    if (!config.contains("path")) {
      throw PreconditionError("static encoder config needs a 'path'");
    }
    return StaticVectorEncoder::Load(config["path"].get<std::string>());
  }
  throw PreconditionError("unknown encoder type '" + type + "'");
}

}  // namespace toxexplain::embedding
