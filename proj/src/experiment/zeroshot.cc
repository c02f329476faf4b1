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

#include "toxexplain/experiment/zeroshot.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

// After the project headers: <resolv.h>, pulled in by httplib, defines a
// `res` macro that breaks Eigen.
#include <httplib.h>

namespace toxexplain::experiment {

namespace fs = std::filesystem;

std::string ZeroShotPrompt(const std::string &post) {
  return "What stereotype is propagated by this post: " + post +
         "? Answer in simple words and keep the length short";
}

HttpChatClient::HttpChatClient(ChatClientConfig config) : config_(std::move(config)) {
  const char *key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw PreconditionError("chat client needs an API key in $" + config_.api_key_env);
  }
  api_key_ = key;
  if (!(StartsWith(config_.url, "http://") || StartsWith(config_.url, "https://"))) {
    throw PreconditionError("chat endpoint URL must start with http:// or https://, got '" +
                            config_.url + "'");
  }
  const size_t slash = config_.url.find('/', config_.url.find("://") + 3);
  origin_ = config_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
  if (config_.max_attempts < 1) throw PreconditionError("max_attempts must be at least 1");
}

void HttpChatClient::WaitForBudget() {
  // Shared by every client in the process.
  static std::mutex mu;
  static std::chrono::steady_clock::time_point last{};
  std::lock_guard<std::mutex> lock(mu);
  const auto earliest = last + std::chrono::milliseconds(config_.min_interval_ms);
  const auto now = std::chrono::steady_clock::now();
  if (now < earliest) std::this_thread::sleep_until(earliest);
  last = std::chrono::steady_clock::now();
}

std::optional<std::string> HttpChatClient::Complete(const std::string &prompt) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  const std::string body =
      Json{{"model", config_.model},
           {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})}}
          .dump();
  int delay_ms = config_.backoff_ms;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    WaitForBudget();
    ++requests_sent_;
    httplib::Result res = client.Post(path_, headers, body, "application/json");
    const int status = res ? res->status : -1;
    spdlog::debug("chat request attempt {} status {}", attempt, status);
    if (res && status == 200) {
      try {
        const Json reply = Json::parse(res->body);
        return Trim(reply.at("choices").at(0).at("message").at("content").get<std::string>());
      } catch (const std::exception &e) {
        spdlog::warn("chat reply unreadable ({}); marked missing", e.what());
        return std::nullopt;
      }
    }
    const bool retryable = !res || status == 429 || status >= 500;
    if (!retryable) {
      spdlog::warn("chat request rejected with status {}", status);
      return std::nullopt;
    }
    if (attempt < config_.max_attempts) {
      int wait_ms = delay_ms;
      if (res && res->has_header("Retry-After")) {
        try {
          wait_ms = std::max(wait_ms, std::stoi(res->get_header_value("Retry-After")) * 1000);
        } catch (const std::exception &) {
          // HTTP-date form; keep the backoff.
        }
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
      delay_ms *= 2;
    }
  }
  spdlog::warn("chat request failed after {} attempts; marked missing", config_.max_attempts);
  return std::nullopt;
}

namespace {

std::string CacheKeyFor(const std::string &model, const std::string &post_id,
                        const std::string &prompt) {
  return model + "\t" + post_id + "\t" + ToHex(Fnv1a64(prompt));
}

}  // namespace

ZeroShotOutput RunZeroShot(const std::vector<ZeroShotPost> &posts, ChatClient &client,
                           const fs::path &cache_path) {
  std::map<std::string, std::string> cached;
  if (fs::exists(cache_path)) {
    for (const Json &row : ReadJsonLines(cache_path)) {
      cached[CacheKeyFor(row.at("model").get<std::string>(), row.at("post_id").get<std::string>(),
                         row.at("prompt").get<std::string>())] = row.at("text").get<std::string>();
    }
  }
  if (cache_path.has_parent_path()) fs::create_directories(cache_path.parent_path());
  std::ofstream append(cache_path, std::ios::app);
  if (!append) throw LoadError("cannot open zero-shot cache " + cache_path.string());

  const std::string model = client.model();
  const std::string hash = ToHex(Fnv1a64("zeroshot\t" + model));
  ZeroShotOutput out;
  for (const auto &p : posts) {
    const std::string prompt = ZeroShotPrompt(p.post);
    const std::string key = CacheKeyFor(model, p.post_id, prompt);
    std::optional<std::string> text;
    if (auto it = cached.find(key); it != cached.end()) {
      text = it->second;
      ++out.cache_hits;
    } else {
      ++out.api_calls;
      text = client.Complete(prompt);
      if (text) {
        // One flushed line per answer, so a crash loses at most the
        // request in flight.
        append << Json{{"post_id", p.post_id}, {"model", model}, {"prompt", prompt},
                       {"text", *text}}
                      .dump()
               << '\n';
        append.flush();
        cached[key] = *text;
      }
    }
    if (!text) {
      out.missing.push_back(p.post_id);
      continue;
    }
    generator::GeneratedExplanation g;
    g.post_id = p.post_id;
    g.input = prompt;
    g.text = *text;
    g.config_hash = hash;
    out.generations.push_back(std::move(g));
  }
  return out;
}

Json ZeroShotConfig::Canonical(const std::string &model) const {
  Json j{{"kind", "zeroshot"},
         {"dataset", dataset},
         {"model", model},
         {"temperature", "provider_default"},
         {"test_limit", test_limit},
         {"toxicity_scorer", toxicity_scorer}};
  if (toxicity_scorer == "regressor") j["regressor"] = regressor;
  return j;
}

ExperimentResult RunZeroShotExperiment(const Workspace &workspace, const ZeroShotConfig &config,
                                       ChatClient &client) {
  const auto start = std::chrono::steady_clock::now();
  auto records = workspace.ReadDatasetSplit(config.dataset, corpus::SplitName::kTest).records;
  if (config.test_limit > 0 && records.size() > config.test_limit) {
    records.resize(config.test_limit);
  }
  std::vector<ZeroShotPost> posts;
  for (const auto &r : records) posts.push_back({r.post.id, r.post.text});

  const Json canonical = config.Canonical(client.model());
  const std::string hash = ToHex(Fnv1a64(canonical.dump()));
  const fs::path cache = workspace.root() / "zeroshot" / (config.dataset + ".jsonl");
  ZeroShotOutput answers = RunZeroShot(posts, client, cache);
  for (auto &g : answers.generations) g.config_hash = hash;

  ExperimentResult result;
  result.kind = "zeroshot";
  result.config_hash = hash;
  result.seed = 0;
  result.config = canonical;
  result.config["name"] = "zeroshot_" + config.dataset;
  result.metrics = EvaluateGenerations(workspace, config.dataset, config.test_limit,
                                       config.toxicity_scorer, config.regressor,
                                       answers.generations);
  result.environment = EnvironmentFingerprint();
  result.training = Json{{"api_calls", answers.api_calls},
                         {"cache_hits", answers.cache_hits},
                         {"missing", answers.missing.size()},
                         {"missing_post_ids", answers.missing}};
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path dir = config.output_dir.empty() ? workspace.ResultsDir()
                                                 : fs::path(config.output_dir);
  fs::create_directories(dir);
  WriteJsonAtomic(dir / (hash + "-seed0.json"), result.ToJson());
  return result;
}

}  // namespace toxexplain::experiment
