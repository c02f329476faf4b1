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

#include "toxexplain/evaluation/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"
#include "toxexplain/evaluation/toxicity.h"

namespace toxexplain::evaluation {
namespace {

constexpr int kMaxOrder = 4;

std::unordered_map<std::string, int> NgramCounts(const std::vector<std::string> &tokens,
                                                 int n) {
  std::unordered_map<std::string, int> counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) key += '\x1f' + tokens[i + j];
    ++counts[key];
  }
  return counts;
}

std::vector<std::string> NonBlank(const std::vector<std::string> &refs) {
  std::vector<std::string> out;
  for (const auto &r : refs) {
    if (!Trim(r).empty()) out.push_back(r);
  }
  return out;
}

Json OptionalJson(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> OptionalFromJson(const Json &j, const char *key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

Json SummaryJson(const std::optional<MetricSummary> &s) {
  if (!s) return nullptr;
  return Json{{"mean", s->mean}, {"std", s->std}, {"n", s->n}};
}

template <typename F>
std::optional<double> MaxOver(const std::vector<std::string> &refs, F score) {
  if (refs.empty()) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto &r : refs) best = std::max(best, score(r));
  return best;
}

}  // namespace

std::vector<std::string> MetricTokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '\'' || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

double SentenceBleu(const std::vector<std::string> &hyp,
                    const std::vector<std::string> &ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= kMaxOrder; ++n) {
    auto hyp_counts = NgramCounts(hyp, n);
    auto ref_counts = NgramCounts(ref, n);
    double matches = 0.0, total = 0.0;
    for (const auto &[gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    if (n > 1) {
      matches += 1.0;
      total += 1.0;
    }
    if (matches == 0.0) return 0.0;
    log_sum += std::log(matches / total);
  }
  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * brevity * std::exp(log_sum / kMaxOrder);
}

size_t LcsLength(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeLF1(const std::vector<std::string> &hyp, const std::vector<std::string> &ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  const double lcs = static_cast<double>(LcsLength(hyp, ref));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / hyp.size(), r = lcs / ref.size();
  return 2.0 * p * r / (p + r);
}

double EmbeddingMatchF1(const std::vector<std::string> &hyp,
                        const std::vector<std::string> &ref,
                        const embedding::TextEncoder &encoder) {
  if (hyp.empty() || ref.empty()) return 0.0;
  std::vector<embedding::Vector> h, r;
  for (const auto &t : hyp) h.push_back(encoder.EmbedToken(t));
  for (const auto &t : ref) r.push_back(encoder.EmbedToken(t));
  Eigen::MatrixXd sim(h.size(), r.size());
  for (size_t i = 0; i < h.size(); ++i) {
    for (size_t j = 0; j < r.size(); ++j) sim(i, j) = embedding::Cosine(h[i], r[j]);
  }
  const double precision = sim.rowwise().maxCoeff().mean();
  const double recall = sim.colwise().maxCoeff().mean();
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> MaxBleu(const std::string &hyp, const std::vector<std::string> &refs) {
  const auto h = MetricTokens(hyp);
  return MaxOver(refs, [&](const std::string &r) { return SentenceBleu(h, MetricTokens(r)); });
}

std::optional<double> MaxRougeL(const std::string &hyp, const std::vector<std::string> &refs) {
  const auto h = MetricTokens(hyp);
  return MaxOver(refs, [&](const std::string &r) { return RougeLF1(h, MetricTokens(r)); });
}

std::optional<double> MaxEmbeddingF1(const std::string &hyp,
                                     const std::vector<std::string> &refs,
                                     const embedding::TextEncoder &encoder) {
  const auto h = MetricTokens(hyp);
  return MaxOver(refs, [&](const std::string &r) {
    return EmbeddingMatchF1(h, MetricTokens(r), encoder);
  });
}

Json SampleMetrics::ToJson() const {
  return Json{{"post_id", post_id},
              {"max_bleu", OptionalJson(max_bleu)},
              {"rouge_l_f1", OptionalJson(rouge_l_f1)},
              {"bert_score_f1", OptionalJson(bert_score_f1)},
              {"toxicity", OptionalJson(toxicity)},
              {"skipped", skipped},
              {"empty_generation", empty_generation}};
}

SampleMetrics SampleMetrics::FromJson(const Json &j) {
  SampleMetrics s;
  s.post_id = j.at("post_id").get<std::string>();
  s.max_bleu = OptionalFromJson(j, "max_bleu");
  s.rouge_l_f1 = OptionalFromJson(j, "rouge_l_f1");
  s.bert_score_f1 = OptionalFromJson(j, "bert_score_f1");
  s.toxicity = OptionalFromJson(j, "toxicity");
  s.skipped = j.value("skipped", false);
  s.empty_generation = j.value("empty_generation", false);
  return s;
}

std::optional<MetricSummary> Summarize(const std::vector<std::optional<double>> &values) {
  MetricSummary s;
  double sum = 0.0;
  for (const auto &v : values) {
    if (!v) continue;
    sum += *v;
    ++s.n;
  }
  if (s.n == 0) return std::nullopt;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (const auto &v : values) {
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

void MetricReport::Aggregate() {
  evaluated = skipped = 0;
  std::vector<std::optional<double>> bleu, rouge, bert, tox;
  for (const auto &s : samples) {
    (s.skipped ? skipped : evaluated) += 1;
    bleu.push_back(s.max_bleu);
    rouge.push_back(s.rouge_l_f1);
    bert.push_back(s.bert_score_f1);
    tox.push_back(s.toxicity);
  }
  max_bleu = Summarize(bleu);
  rouge_l_f1 = Summarize(rouge);
  bert_score_f1 = Summarize(bert);
  toxicity = Summarize(tox);
}

Json MetricReport::ToJson() const {
  Json rows = Json::array();
  for (const auto &s : samples) rows.push_back(s.ToJson());
  return Json{{"evaluated", evaluated},
              {"skipped", skipped},
              {"bert_score_encoder", bert_score_encoder},
              {"toxicity_scorer", toxicity_scorer},
              {"metrics",
               {{"max_bleu", SummaryJson(max_bleu)},
                {"rouge_l_f1", SummaryJson(rouge_l_f1)},
                {"bert_score_f1", SummaryJson(bert_score_f1)},
                {"toxicity", SummaryJson(toxicity)}}},
              {"samples", rows}};
}

MetricReport MetricReport::FromJson(const Json &j) {
  MetricReport r;
  for (const auto &row : j.at("samples")) r.samples.push_back(SampleMetrics::FromJson(row));
  r.bert_score_encoder = j.value("bert_score_encoder", "");
  r.toxicity_scorer = j.value("toxicity_scorer", "");
  r.Aggregate();
  return r;
}

MetricReport Evaluate(const std::vector<EvaluationItem> &items,
                      const EvaluationOptions &options) {
  MetricReport report;
  if (options.bert_encoder) report.bert_score_encoder = options.bert_encoder->name();
  for (const auto &item : items) {
    SampleMetrics s;
    s.post_id = item.post_id;
    s.empty_generation = Trim(item.generation).empty();
    std::vector<std::string> refs = NonBlank(item.references);
    if (refs.empty()) {
      if (options.skip_empty_references) {
        s.skipped = true;
      } else {
        refs.push_back("");
      }
    }
    if (!s.skipped) {
      s.max_bleu = MaxBleu(item.generation, refs);
      s.rouge_l_f1 = MaxRougeL(item.generation, refs);
      if (options.bert_encoder) {
        s.bert_score_f1 = MaxEmbeddingF1(item.generation, refs, *options.bert_encoder);
      }
    }
    report.samples.push_back(std::move(s));
  }
  if (options.toxicity) {
    report.toxicity_scorer = options.toxicity->name();
    std::vector<std::string> texts;
    for (const auto &item : items) texts.push_back(item.generation);
    std::vector<ToxicityResult> scores = options.toxicity->Score(texts);
    if (scores.size() != items.size()) {
      throw ShapeError("toxicity scorer returned " + std::to_string(scores.size()) +
                       " results for " + std::to_string(items.size()) + " texts");
    }
    for (size_t i = 0; i < items.size(); ++i) report.samples[i].toxicity = scores[i].score;
  }
  report.Aggregate();
  return report;
}

}  // namespace toxexplain::evaluation
