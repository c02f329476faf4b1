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

#ifndef TOXEXPLAIN_ANALYSIS_STATISTICS_H_
#define TOXEXPLAIN_ANALYSIS_STATISTICS_H_

#include <optional>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/evaluation/metrics.h"

namespace toxexplain::analysis {

using ScoreLists = std::vector<std::vector<double>>;

enum class Binning {
  // [lo, hi) bins; the last bin is closed.
  kFixedHalfOpen,
  // One bin per value rounded to the nearest 0.1.
  kRoundNearestTenth,
};

struct HistogramBin {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;
  size_t count = 0;
  double proportion = 0.0;
};

struct ScoreHistogram {
  Binning binning = Binning::kFixedHalfOpen;
  std::vector<HistogramBin> bins;
  size_t total = 0;
};

// Histogram over every score of every sample. For fixed bins, `edges`
// lists ascending bin boundaries (at least two); when empty, ten equal
// bins span the observed range. Scores outside the edges, an empty input
// or non-finite scores raise PreconditionError.
ScoreHistogram ScoreDistribution(const ScoreLists &scores, Binning binning,
                                 const std::vector<double> &edges = {});

// Share of samples whose best score reaches `threshold`. Samples with no
// retrieved tuples count as not reaching it.
double FractionWithMaxAtLeast(const ScoreLists &scores, double threshold);

struct UniquenessHistogram {
  int k = 20;
  // counts[u] = samples with u distinct scores, u in 1..k (index 0 unused).
  std::vector<size_t> counts;
  // Samples with fewer than k scores; left out of `counts`.
  size_t shortfall = 0;

  size_t included() const;
};

// Distinct values among each sample's first k scores (exact comparison).
UniquenessHistogram CountUniqueScores(const ScoreLists &scores, int k = 20);
size_t DistinctCount(const std::vector<double> &values);

struct PairedTestResult {
  double t = 0.0;
  double p = 1.0;
  // Mean of the differences over their sample standard deviation.
  double effect_size = 0.0;
  double mean_difference = 0.0;
  size_t n = 0;
  // The differences have no spread, so t is not defined; p is 1 when the
  // mean difference is zero and 0 otherwise.
  bool degenerate = false;
};

// Two-sided paired t-test on a - b. Requires equal lengths of at least 2.
PairedTestResult PairedTTest(const std::vector<double> &a, const std::vector<double> &b);

// "**" for p <= 0.001, "*" for p <= 0.05, "" otherwise.
std::string SignificanceStars(double p);

// Cosine of two annotators' score vectors; nullopt if either is all zero.
std::optional<double> AnnotatorAgreement(const std::vector<double> &a,
                                         const std::vector<double> &b);

// Values of one metric ("max_bleu", "rouge_l_f1", "bert_score_f1",
// "toxicity") for the posts both runs scored, in the order of `a`.
struct AlignedPairs {
  std::vector<std::string> post_ids;
  std::vector<double> a;
  std::vector<double> b;
};
AlignedPairs AlignMetric(const std::vector<evaluation::SampleMetrics> &a,
                         const std::vector<evaluation::SampleMetrics> &b,
                         const std::string &metric);
std::optional<double> MetricValue(const evaluation::SampleMetrics &s, const std::string &metric);

struct NamedPairedTest {
  std::string first;
  std::string second;
  std::string metric;
  PairedTestResult result;
};

// The significance column holds the stars, or "ns" when there are none.
std::string PairedTestsCsv(const std::vector<NamedPairedTest> &tests);
std::string HistogramCsv(const ScoreHistogram &histogram);
std::string UniquenessCsv(const UniquenessHistogram &histogram);

}  // namespace toxexplain::analysis

#endif  // TOXEXPLAIN_ANALYSIS_STATISTICS_H_
