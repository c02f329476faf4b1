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

// Writes the synthetic demo corpora used by the quick-start walkthrough.

#include <iostream>

#include "CLI11.hpp"
#include "toxexplain/common/errors.h"
#include "toxexplain/synth/synth.h"

int main(int argc, char **argv) {
  CLI::App app{"Write synthetic explanation, toxicity and knowledge-graph corpora"};
  std::string out = "demo";
  toxexplain::synth::DemoDataOptions options;
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--train", options.explanation_train, "Training posts per explanation corpus")
      ->capture_default_str();
  app.add_option("--test", options.explanation_test, "Test posts per explanation corpus")
      ->capture_default_str();
  app.add_option("--toxicity", options.toxicity_records, "Toxicity records")
      ->capture_default_str();
  app.add_option("--kg-tuples", options.kg_tuples, "Tuples per knowledge graph")
      ->capture_default_str();
  app.add_option("--seed", options.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto &path : toxexplain::synth::WriteDemoData(out, options)) {
      std::cout << path.string() << "\n";
    }
  } catch (const toxexplain::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
