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

#include "toxexplain/evaluation/toxicity.h"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "toxexplain/attributes/attributes.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"

namespace toxexplain::evaluation {

std::string RegressorToxicityScorer::name() const {
  return "regressor:" + model_.checkpoint_id();
}

std::vector<ToxicityResult> RegressorToxicityScorer::Score(
    const std::vector<std::string> &texts) {
  const size_t head = static_cast<size_t>(attributes::ToxicityLabel::kToxicity);
  std::vector<ToxicityResult> out;
  out.reserve(texts.size());
  for (const auto &text : texts) {
    ToxicityResult r;
    if (Trim(text).empty()) {
      r.score = 0.0;
      r.empty_input = true;
    } else {
      r.score = model_.Predict(text)[head];
    }
    out.push_back(r);
  }
  return out;
}

HttpToxicityScorer::HttpToxicityScorer(HttpScorerConfig config) : config_(std::move(config)) {
  const char *key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw PreconditionError("toxicity endpoint needs an API key in $" + config_.api_key_env);
  }
  api_key_ = key;
  const size_t scheme = config_.url.find("://");
  if (scheme == std::string::npos ||
      !(StartsWith(config_.url, "http://") || StartsWith(config_.url, "https://"))) {
    throw PreconditionError("toxicity endpoint URL must start with http:// or https://, got '" +
                            config_.url + "'");
  }
  const size_t slash = config_.url.find('/', scheme + 3);
  origin_ = config_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
  if (config_.max_attempts < 1) throw PreconditionError("max_attempts must be at least 1");
}

HttpToxicityScorer::~HttpToxicityScorer() = default;

std::string HttpToxicityScorer::name() const { return "http:" + origin_ + path_; }

std::optional<double> HttpToxicityScorer::ScoreOne(const std::string &text, size_t index) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  const std::string body = Json{{"text", text}}.dump();
  int delay_ms = config_.backoff_ms;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    ++requests_sent_;
    const auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(path_, headers, body, "application/json");
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    const int status = res ? res->status : -1;
    if (config_.privacy) {
      spdlog::info("toxicity request {} attempt {} status {} ({} ms)", index, attempt, status,
                   ms);
    } else {
      spdlog::info("toxicity request {} attempt {} status {} ({} ms) text='{}'", index,
                   attempt, status, ms, text);
    }
    if (res && status == 200) {
      try {
        Json reply = Json::parse(res->body);
        const double score = reply.at("toxicity").get<double>();
        if (score >= 0.0 && score <= 1.0) return score;
        spdlog::warn("toxicity request {}: score {} outside [0, 1]; marked missing", index,
                     score);
      } catch (const std::exception &e) {
        spdlog::warn("toxicity request {}: unreadable reply ({}); marked missing", index,
                     e.what());
      }
      return std::nullopt;
    }
    const bool retryable = !res || status == 429 || status >= 500;
    if (!retryable) break;
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
  }
  spdlog::warn("toxicity request {} failed; marked missing", index);
  return std::nullopt;
}

std::vector<ToxicityResult> HttpToxicityScorer::Score(const std::vector<std::string> &texts) {
  std::vector<ToxicityResult> out;
  out.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    ToxicityResult r;
    if (Trim(texts[i]).empty()) {
      r.score = 0.0;
      r.empty_input = true;
    } else {
      r.score = ScoreOne(texts[i], i);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace toxexplain::evaluation
