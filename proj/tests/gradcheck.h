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

#ifndef TOXEXPLAIN_TESTS_GRADCHECK_H_
#define TOXEXPLAIN_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "toxexplain/nn/graph.h"
#include "toxexplain/nn/parameters.h"

namespace toxexplain::testing {

// Central finite differences over every entry of the given parameters,
// compared against the analytic gradient from Graph::Backward. Returns the
// worst relative error max|a - n| / max(|a|, |n|, floor).
struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t checked = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

inline GradCheckResult CheckGradients(
    nn::ParameterStore &store, const std::vector<nn::Parameter *> &params,
    const std::function<nn::Var(nn::Graph &)> &loss_fn, double step = 1e-6,
    double floor = 1e-6) {
  store.ZeroGrad();
  {
    nn::Graph g;
    g.Backward(loss_fn(g));
  }
  std::vector<nn::Matrix> analytic;
  for (nn::Parameter *p : params) analytic.push_back(p->grad());
  store.ZeroGrad();

  auto eval = [&]() {
    nn::Graph g(false);
    return g.Scalar(loss_fn(g));
  };

  GradCheckResult result;
  for (size_t k = 0; k < params.size(); ++k) {
    nn::Matrix &w = params[k]->value();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + step;
      const double up = eval();
      w.data()[i] = saved - step;
      const double down = eval();
      w.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
      ++result.checked;
    }
  }
  return result;
}

}  // namespace toxexplain::testing

#endif  // TOXEXPLAIN_TESTS_GRADCHECK_H_
