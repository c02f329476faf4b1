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

#ifndef TOXEXPLAIN_NN_OPTIMIZER_H_
#define TOXEXPLAIN_NN_OPTIMIZER_H_

#include <vector>

#include "toxexplain/nn/parameters.h"

namespace toxexplain::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW)
  double clip_norm = 1.0;     // <= 0 disables clipping
};

class Adam {
 public:
  Adam(ParameterStore &store, AdamConfig config);

  // Applies one update from the accumulated gradients, then zeroes them.
  // Returns the pre-clipping gradient norm.
  double Step();

  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  const AdamConfig &config() const { return config_; }

 private:
  ParameterStore &store_;
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long step_ = 0;
};

}  // namespace toxexplain::nn

#endif  // TOXEXPLAIN_NN_OPTIMIZER_H_
