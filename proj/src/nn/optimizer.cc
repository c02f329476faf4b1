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

#include "toxexplain/nn/optimizer.h"

#include <cmath>

namespace toxexplain::nn {

Adam::Adam(ParameterStore &store, AdamConfig config)
    : store_(store), config_(config) {
  for (const auto &p : store_.all()) {
    m_.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
    v_.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
  }
}

double Adam::Step() {
  const double norm = store_.GradNorm();
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) {
    store_.ScaleGrads(config_.clip_norm / norm);
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const auto &params = store_.all();
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter &p = *params[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad();
    v_[i] = config_.beta2 * v_[i] +
            (1.0 - config_.beta2) * p.grad().cwiseProduct(p.grad());
    if (config_.weight_decay > 0.0) {
      p.value() *= 1.0 - config_.learning_rate * config_.weight_decay;
    }
    p.value().array() -=
        config_.learning_rate * (m_[i].array() / bc1) /
        ((v_[i].array() / bc2).sqrt() + config_.epsilon);
    p.ZeroGrad();
  }
  return norm;
}

}  // namespace toxexplain::nn
