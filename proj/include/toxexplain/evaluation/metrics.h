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

#ifndef TOXEXPLAIN_EVALUATION_METRICS_H_
#define TOXEXPLAIN_EVALUATION_METRICS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/embedding/encoder.h"

namespace toxexplain::evaluation {

class ToxicityScorer;

// Lowercased word tokens; punctuation is dropped.
std::vector<std::string> MetricTokens(std::string_view text);

// Sentence-level 4-gram BLEU in [0, 100]. Unigram precision is unsmoothed;
// higher orders add one to both counts so short sentences still score.
double SentenceBleu(const std::vector<std::string> &hyp,
                    const std::vector<std::string> &ref);

// LCS-based F1 in [0, 1].
double RougeLF1(const std::vector<std::string> &hyp, const std::vector<std::string> &ref);
size_t LcsLength(const std::vector<std::string> &a, const std::vector<std::string> &b);

// Greedy token-embedding matching F1: each token is matched to its most
// similar counterpart, precision and recall average those similarities.
double EmbeddingMatchF1(const std::vector<std::string> &hyp,
                        const std::vector<std::string> &ref,
                        const embedding::TextEncoder &encoder);

// Maxima over a reference set; nullopt when `refs` is empty.
std::optional<double> MaxBleu(const std::string &hyp, const std::vector<std::string> &refs);
std::optional<double> MaxRougeL(const std::string &hyp, const std::vector<std::string> &refs);
std::optional<double> MaxEmbeddingF1(const std::string &hyp,
                                     const std::vector<std::string> &refs,
                                     const embedding::TextEncoder &encoder);

struct EvaluationItem {
  std::string post_id;
  std::string generation;
  std::vector<std::string> references;
};

struct SampleMetrics {
  std::string post_id;
  std::optional<double> max_bleu;
  std::optional<double> rouge_l_f1;
  std::optional<double> bert_score_f1;
  std::optional<double> toxicity;
  // No usable references; reference metrics are absent.
  bool skipped = false;
  bool empty_generation = false;

  Json ToJson() const;
  static SampleMetrics FromJson(const Json &j);
};

struct MetricSummary {
  double mean = 0.0;
  // Sample standard deviation; 0 for a single value.
  double std = 0.0;
  size_t n = 0;
};

// Mean and spread of the present values, in input order.
std::optional<MetricSummary> Summarize(const std::vector<std::optional<double>> &values);

struct MetricReport {
  std::vector<SampleMetrics> samples;
  size_t evaluated = 0;
  size_t skipped = 0;
  std::optional<MetricSummary> max_bleu;
  std::optional<MetricSummary> rouge_l_f1;
  std::optional<MetricSummary> bert_score_f1;
  std::optional<MetricSummary> toxicity;
  std::string bert_score_encoder;
  std::string toxicity_scorer;

  // Recomputes the summaries and counts from `samples`.
  void Aggregate();
  Json ToJson() const;
  static MetricReport FromJson(const Json &j);
};

struct EvaluationOptions {
  // Absent encoder or scorer leaves that metric absent.
  const embedding::TextEncoder *bert_encoder = nullptr;
  ToxicityScorer *toxicity = nullptr;
  // Items whose references are all blank are excluded from the reference
  // metrics. When false they are scored against an empty reference.
  bool skip_empty_references = true;
};

MetricReport Evaluate(const std::vector<EvaluationItem> &items,
                      const EvaluationOptions &options);

}  // namespace toxexplain::evaluation

#endif  // TOXEXPLAIN_EVALUATION_METRICS_H_
