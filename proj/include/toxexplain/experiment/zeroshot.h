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

#ifndef TOXEXPLAIN_EXPERIMENT_ZEROSHOT_H_
#define TOXEXPLAIN_EXPERIMENT_ZEROSHOT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/experiment/runner.h"

namespace toxexplain::experiment {

// The fixed question put to the chat model for one post.
std::string ZeroShotPrompt(const std::string &post);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Model identifier recorded with every cached answer.
  virtual std::string model() const = 0;
  // nullopt once the client has given up on this prompt.
  virtual std::optional<std::string> Complete(const std::string &prompt) = 0;
};

struct ChatClientConfig {
  // OpenAI-style chat completions endpoint.
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "TOXEXPLAIN_LLM_API_KEY";
  int max_attempts = 4;
  int backoff_ms = 500;
  int timeout_s = 60;
  // Minimum spacing between requests from this process.
  int min_interval_ms = 1000;
};

// Sends {"model", "messages": [{"role": "user", ...}]} and reads
// choices[0].message.content. Temperature is never sent, so the provider
// default applies. Network errors, 429 and 5xx are retried with
// exponential backoff (a numeric Retry-After wins when larger).
class HttpChatClient : public ChatClient {
 public:
  // Throws PreconditionError when the key variable is unset or the URL is
  // malformed.
  explicit HttpChatClient(ChatClientConfig config);
  std::string model() const override { return config_.model; }
  std::optional<std::string> Complete(const std::string &prompt) override;
  size_t requests_sent() const { return requests_sent_; }

 private:
  void WaitForBudget();

  ChatClientConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
  size_t requests_sent_ = 0;
};

struct ZeroShotPost {
  std::string post_id;
  std::string post;
};

struct ZeroShotOutput {
  // Answered posts, in input order.
  std::vector<generator::GeneratedExplanation> generations;
  // Posts the client failed on; a rerun retries them.
  std::vector<std::string> missing;
  size_t api_calls = 0;
  size_t cache_hits = 0;
};

// Answers every post, reading and appending the JSON-lines cache at
// `cache_path` so that an interrupted run resumes where it stopped.
ZeroShotOutput RunZeroShot(const std::vector<ZeroShotPost> &posts, ChatClient &client,
                           const std::filesystem::path &cache_path);

struct ZeroShotConfig {
  std::string dataset = "sbic";
  size_t test_limit = 0;
  std::string toxicity_scorer = "none";
  std::string regressor = "default";
  std::string output_dir;

  Json Canonical(const std::string &model) const;
};

// Zero-shot answers for the test split, scored like a trained run. The
// result's training block records the provider settings and missing count.
ExperimentResult RunZeroShotExperiment(const Workspace &workspace, const ZeroShotConfig &config,
                                       ChatClient &client);

}  // namespace toxexplain::experiment

#endif  // TOXEXPLAIN_EXPERIMENT_ZEROSHOT_H_
