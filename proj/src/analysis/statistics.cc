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

#include "toxexplain/analysis/statistics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "toxexplain/common/errors.h"

namespace toxexplain::analysis {
namespace {

std::string Num(double v, const char *fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Never an empty cell: "ns" stands for no stars.
std::string Significance(double p) {
  const std::string stars = SignificanceStars(p);
  return stars.empty() ? "ns" : stars;
}

}  // namespace

ScoreHistogram ScoreDistribution(const ScoreLists &scores, Binning binning,
                                 const std::vector<double> &edges) {
  std::vector<double> flat;
  for (const auto &sample : scores) {
    for (double s : sample) {
      if (!std::isfinite(s)) throw PreconditionError("histogram got a non-finite score");
      flat.push_back(s);
    }
  }
  if (flat.empty()) throw PreconditionError("histogram needs at least one score");
  ScoreHistogram h;
  h.binning = binning;
  h.total = flat.size();

  if (binning == Binning::kRoundNearestTenth) {
    std::map<long long, size_t> counts;
    for (double s : flat) ++counts[std::llround(s * 10.0)];
    for (const auto &[tenth, count] : counts) {
      HistogramBin bin;
      bin.lower = bin.upper = tenth / 10.0;
      bin.label = Num(bin.lower, "%.1f");
      bin.count = count;
      h.bins.push_back(bin);
    }
  } else {
    std::vector<double> e = edges;
    if (e.empty()) {
      const auto [lo, hi] = std::minmax_element(flat.begin(), flat.end());
      if (*lo == *hi) {
        e = {*lo, *hi};
      } else {
        for (int i = 0; i <= 10; ++i) e.push_back(*lo + (*hi - *lo) * i / 10.0);
        e.back() = *hi;
      }
    }
    if (e.size() < 2) throw PreconditionError("fixed bins need at least two edges");
    for (size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1]) && !(e.size() == 2 && e[0] == e[1])) {
        throw PreconditionError("bin edges must be strictly increasing");
      }
    }
    const size_t nbins = e.size() - 1;
    h.bins.resize(nbins);
    for (size_t i = 0; i < nbins; ++i) {
      h.bins[i].lower = e[i];
      h.bins[i].upper = e[i + 1];
      h.bins[i].label = "[" + Num(e[i]) + ", " + Num(e[i + 1]) + (i + 1 == nbins ? "]" : ")");
    }
    for (double s : flat) {
      if (s < e.front() || s > e.back()) {
        throw PreconditionError("score " + Num(s) + " lies outside the bin edges [" +
                                Num(e.front()) + ", " + Num(e.back()) + "]");
      }
      // First edge strictly above s closes the bin; the top edge belongs to
      // the last bin.
      size_t bin = std::upper_bound(e.begin(), e.end(), s) - e.begin();
      bin = bin == 0 ? 0 : bin - 1;
      ++h.bins[std::min(bin, nbins - 1)].count;
    }
  }
  for (auto &bin : h.bins) bin.proportion = static_cast<double>(bin.count) / h.total;
  return h;
}

double FractionWithMaxAtLeast(const ScoreLists &scores, double threshold) {
  if (scores.empty()) throw PreconditionError("no samples");
  size_t hits = 0;
  for (const auto &sample : scores) {
    if (!sample.empty() && *std::max_element(sample.begin(), sample.end()) >= threshold) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / scores.size();
}

size_t UniquenessHistogram::included() const {
  size_t total = 0;
  for (size_t c : counts) total += c;
  return total;
}

size_t DistinctCount(const std::vector<double> &values) {
  return std::set<double>(values.begin(), values.end()).size();
}

UniquenessHistogram CountUniqueScores(const ScoreLists &scores, int k) {
  if (k < 1) throw PreconditionError("k must be at least 1");
  UniquenessHistogram h;
  h.k = k;
  h.counts.assign(k + 1, 0);
  for (const auto &sample : scores) {
    if (sample.size() < static_cast<size_t>(k)) {
      ++h.shortfall;
      continue;
    }
    ++h.counts[DistinctCount({sample.begin(), sample.begin() + k})];
  }
  return h;
}

PairedTestResult PairedTTest(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size()) {
    throw PreconditionError("paired test needs equal lengths, got " +
                            std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (a.size() < 2) throw PreconditionError("paired test needs at least 2 pairs");
  PairedTestResult r;
  r.n = a.size();
  const double n = static_cast<double>(r.n);
  double mean = 0.0;
  for (size_t i = 0; i < r.n; ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (size_t i = 0; i < r.n; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  r.mean_difference = mean;
  // Rounding in a - b leaves a little spread behind an exact constant
  // shift; treat that as none.
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
    r.degenerate = true;
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
      r.effect_size = 0.0;
    } else {
      const double inf = std::numeric_limits<double>::infinity();
      r.t = mean > 0 ? inf : -inf;
      r.p = 0.0;
      r.effect_size = r.t;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(n));
  r.effect_size = mean / sd;
  boost::math::students_t dist(n - 1.0);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

std::string SignificanceStars(double p) {
  if (p <= 0.001) return "**";
  if (p <= 0.05) return "*";
  return "";
}

std::optional<double> AnnotatorAgreement(const std::vector<double> &a,
                                         const std::vector<double> &b) {
  if (a.size() != b.size()) {
    throw PreconditionError("annotator score vectors differ in length: " +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return dot / std::sqrt(na * nb);
}

std::optional<double> MetricValue(const evaluation::SampleMetrics &s, const std::string &metric) {
  if (metric == "max_bleu") return s.max_bleu;
  if (metric == "rouge_l_f1") return s.rouge_l_f1;
  if (metric == "bert_score_f1") return s.bert_score_f1;
  if (metric == "toxicity") return s.toxicity;
  throw PreconditionError("unknown metric '" + metric + "'");
}

AlignedPairs AlignMetric(const std::vector<evaluation::SampleMetrics> &a,
                         const std::vector<evaluation::SampleMetrics> &b,
                         const std::string &metric) {
  std::unordered_map<std::string, double> other;
  for (const auto &s : b) {
    if (auto v = MetricValue(s, metric)) other[s.post_id] = *v;
  }
  AlignedPairs out;
  for (const auto &s : a) {
    auto v = MetricValue(s, metric);
    auto it = other.find(s.post_id);
    if (!v || it == other.end()) continue;
    out.post_ids.push_back(s.post_id);
    out.a.push_back(*v);
    out.b.push_back(it->second);
  }
  return out;
}

std::string PairedTestsCsv(const std::vector<NamedPairedTest> &tests) {
  std::string out = FormatDelimitedRow({"first", "second", "metric", "n", "mean_difference",
                                        "t", "p", "effect_size", "significance",
                                        "degenerate"}) +
                    "\n";
  for (const auto &t : tests) {
    out += FormatDelimitedRow({t.first, t.second, t.metric, std::to_string(t.result.n),
                               Num(t.result.mean_difference), Num(t.result.t),
                               Num(t.result.p), Num(t.result.effect_size),
                               Significance(t.result.p),
                               t.result.degenerate ? "true" : "false"}) +
           "\n";
  }
  return out;
}

std::string HistogramCsv(const ScoreHistogram &histogram) {
  std::string out = "bin,lower,upper,count,proportion\n";
  for (const auto &b : histogram.bins) {
    out += FormatDelimitedRow({b.label, Num(b.lower), Num(b.upper), std::to_string(b.count),
                               Num(b.proportion)}) +
           "\n";
  }
  return out;
}

std::string UniquenessCsv(const UniquenessHistogram &histogram) {
  std::string out = "unique_scores,count,proportion\n";
  const size_t included = histogram.included();
  for (int u = 1; u <= histogram.k; ++u) {
    const size_t c = histogram.counts[u];
    out += std::to_string(u) + "," + std::to_string(c) + "," +
           Num(included ? static_cast<double>(c) / included : 0.0) + "\n";
  }
  return out;
}

}  // namespace toxexplain::analysis
