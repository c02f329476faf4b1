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

#ifndef TOXEXPLAIN_EVALUATION_TOXICITY_H_
#define TOXEXPLAIN_EVALUATION_TOXICITY_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/tox_regressor/regressor.h"

namespace toxexplain::evaluation {

struct ToxicityResult {
  // Absent when the scorer failed for this text; never filled in.
  std::optional<double> score;
  // The text was empty and received the scorer's floor value.
  bool empty_input = false;
};

class ToxicityScorer {
 public:
  virtual ~ToxicityScorer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<ToxicityResult> Score(const std::vector<std::string> &texts) = 0;
};

// The toxicity head of the in-repo regressor.
class RegressorToxicityScorer : public ToxicityScorer {
 public:
  explicit RegressorToxicityScorer(const tox_regressor::ToxicityRegressor &model)
      : model_(model) {}

  std::string name() const override;
  std::vector<ToxicityResult> Score(const std::vector<std::string> &texts) override;

 private:
  const tox_regressor::ToxicityRegressor &model_;
};

struct HttpScorerConfig {
  // e.g. "https://host:443/v1/score". Request body {"text": ...}; the
  // response must carry a numeric "toxicity" field in [0, 1].
  std::string url;
  // Environment variable holding the API key, sent as a bearer token.
  std::string api_key_env = "TOXEXPLAIN_TOXICITY_API_KEY";
  int max_attempts = 3;
  int backoff_ms = 200;
  int timeout_s = 10;
  // Keep post text out of the logs.
  bool privacy = true;
};

// Scores texts one request at a time against an external endpoint. A text
// that still fails after max_attempts is reported as missing.
class HttpToxicityScorer : public ToxicityScorer {
 public:
  // Throws PreconditionError when the key variable is unset or the URL is
  // malformed.
  explicit HttpToxicityScorer(HttpScorerConfig config);
  ~HttpToxicityScorer() override;

  std::string name() const override;
  std::vector<ToxicityResult> Score(const std::vector<std::string> &texts) override;

  size_t requests_sent() const { return requests_sent_; }

 private:
  std::optional<double> ScoreOne(const std::string &text, size_t index);

  HttpScorerConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
  size_t requests_sent_ = 0;
};

}  // namespace toxexplain::evaluation

#endif  // TOXEXPLAIN_EVALUATION_TOXICITY_H_
