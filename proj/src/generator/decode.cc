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

#include "toxexplain/generator/decode.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "toxexplain/common/errors.h"

namespace toxexplain::generator {
namespace {

using nn::Vocabulary;

// Decoder state shared by both search procedures: the encoder memory is
// computed once and reused for every prefix.
class Stepper {
 public:
  Stepper(const Seq2SeqModel &model, const EncodedExample &example)
      : model_(model) {
    nn::Graph g(false);
    memory_ = g.value(model.Memory(g, example, {}));
  }

  Eigen::RowVectorXd LogProbs(const std::vector<int> &prefix) const {
    nn::Graph g(false);
    nn::Var logits = model_.DecoderLogits(g, g.Constant(memory_), prefix, {});
    const nn::Matrix &z = g.value(logits);
    Eigen::RowVectorXd last = z.row(z.rows() - 1);
    const double max = last.maxCoeff();
    const double lse = max + std::log((last.array() - max).exp().sum());
    return last.array() - lse;
  }

 private:
  const Seq2SeqModel &model_;
  nn::Matrix memory_;
};

}  // namespace

void DecodeParams::Validate() const {
  if (beams < 1) throw PreconditionError("beams must be at least 1");
  if (max_length < 1) throw PreconditionError("max_length must be at least 1");
}

Json DecodeParams::ToJson() const {
  return {{"beams", beams},
          {"length_penalty", length_penalty},
          {"max_length", max_length}};
}

DecodeParams DecodeParams::FromJson(const Json &json) {
  DecodeParams p;
  p.beams = json.value("beams", p.beams);
  p.length_penalty = json.value("length_penalty", p.length_penalty);
  p.max_length = json.value("max_length", p.max_length);
  p.Validate();
  return p;
}

std::vector<int> GreedyDecode(const Seq2SeqModel &model,
                              const EncodedExample &example, int max_length) {
  Stepper stepper(model, example);
  std::vector<int> prefix = {Vocabulary::kBos};
  for (int step = 0; step < max_length; ++step) {
    Eigen::RowVectorXd lp = stepper.LogProbs(prefix);
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < lp.size(); ++v) {
      if (lp[v] > lp[best]) best = v;
    }
    if (best == Vocabulary::kEos) break;
    prefix.push_back(static_cast<int>(best));
  }
  return {prefix.begin() + 1, prefix.end()};
}

std::vector<int> BeamSearch(const Seq2SeqModel &model,
                            const EncodedExample &example,
                            const DecodeParams &params) {
  params.Validate();
  const int beams = params.beams;
  Stepper stepper(model, example);

  struct Beam {
    std::vector<int> tokens;  // starts with <bos>
    double logprob;
  };
  struct Finished {
    double score;
    std::vector<int> tokens;  // without <bos>/<eos>
  };
  auto length_score = [&](double logprob, size_t generated) {
    return logprob / std::pow(static_cast<double>(generated), params.length_penalty);
  };

  std::vector<Beam> live = {{{Vocabulary::kBos}, 0.0}};
  std::vector<Finished> finished;
  for (int step = 0; step < params.max_length && !live.empty(); ++step) {
    // (score, beam index, token)
    std::vector<std::tuple<double, int, int>> candidates;
    for (int b = 0; b < static_cast<int>(live.size()); ++b) {
      Eigen::RowVectorXd lp = stepper.LogProbs(live[b].tokens);
      for (Eigen::Index v = 0; v < lp.size(); ++v) {
        candidates.emplace_back(live[b].logprob + lp[v], b, static_cast<int>(v));
      }
    }
    const size_t keep = std::min(candidates.size(), static_cast<size_t>(2 * beams));
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), [](const auto &a, const auto &b) {
                        if (std::get<0>(a) != std::get<0>(b)) {
                          return std::get<0>(a) > std::get<0>(b);
                        }
                        return std::make_pair(std::get<1>(a), std::get<2>(a)) <
                               std::make_pair(std::get<1>(b), std::get<2>(b));
                      });
    std::vector<Beam> next;
    for (size_t rank = 0; rank < keep; ++rank) {
      auto [score, b, token] = candidates[rank];
      const Beam &parent = live[b];
      if (token == Vocabulary::kEos) {
        // Only ends among the top `beams` candidates count.
        if (rank >= static_cast<size_t>(beams)) continue;
        finished.push_back({length_score(score, parent.tokens.size()),
                            {parent.tokens.begin() + 1, parent.tokens.end()}});
      } else {
        Beam child{parent.tokens, score};
        child.tokens.push_back(token);
        next.push_back(std::move(child));
      }
      if (static_cast<int>(next.size()) == beams) break;
    }
    if (static_cast<int>(finished.size()) >= beams) {
      live.clear();
      break;
    }
    live = std::move(next);
  }
  // Out of length: unfinished beams compete as they are.
  for (const Beam &b : live) {
    finished.push_back({length_score(b.logprob, std::max<size_t>(1, b.tokens.size() - 1)),
                        {b.tokens.begin() + 1, b.tokens.end()}});
  }
  if (finished.empty()) return {};
  const Finished *best = &finished.front();
  for (const Finished &f : finished) {
    if (f.score > best->score) best = &f;
  }
  return best->tokens;
}

Json GeneratedExplanation::ToJson() const {
  return {{"post_id", post_id},
          {"input", input},
          {"generation", text},
          {"config_hash", config_hash},
          {"seed", seed}};
}

GeneratedExplanation GeneratedExplanation::FromJson(const Json &json) {
  GeneratedExplanation g;
  g.post_id = json.at("post_id").get<std::string>();
  g.input = json.value("input", "");
  g.text = json.at("generation").get<std::string>();
  g.config_hash = json.value("config_hash", "");
  g.seed = json.value("seed", uint64_t{0});
  return g;
}

std::vector<GeneratedExplanation> Generate(
    const Seq2SeqModel &model, const std::vector<GenerationRequest> &requests,
    const DecodeParams &params, const std::string &config_hash, uint64_t seed) {
  std::vector<GeneratedExplanation> out;
  out.reserve(requests.size());
  for (const GenerationRequest &req : requests) {
    EncodedExample ex = model.Encode(req.input);
    std::vector<int> ids = BeamSearch(model, ex, params);
    GeneratedExplanation g;
    g.post_id = req.post_id;
    g.input = req.input.attributes.empty()
                  ? req.input.source
                  : req.input.source + " || " + req.input.attributes;
    g.text = model.vocab().Decode(ids);
    g.config_hash = config_hash;
    g.seed = seed;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace toxexplain::generator
