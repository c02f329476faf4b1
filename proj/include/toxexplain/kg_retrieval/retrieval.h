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

#ifndef TOXEXPLAIN_KG_RETRIEVAL_RETRIEVAL_H_
#define TOXEXPLAIN_KG_RETRIEVAL_RETRIEVAL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toxexplain/common/io.h"
#include "toxexplain/embedding/encoder.h"
#include "toxexplain/kg_retrieval/query.h"

namespace toxexplain::kg_retrieval {

struct KnowledgeTuple {
  // Position in the source file; the tie-break key for rankings.
  uint32_t id = 0;
  std::string head;
  std::string relation;
  std::string tail;
  double weight = 1.0;
  std::string linearized;
};

// "/c/en/ice_cream/n" -> "ice cream"; plain strings are lowercased and
// underscores become spaces.
std::string ConceptText(std::string_view node);
// "/r/IsA" -> "is a", "HasProperty" -> "has property".
std::string RelationText(std::string_view relation);
// "head relation tail" in plain words.
std::string Linearize(std::string_view head, std::string_view relation,
                      std::string_view tail);

// Delimited dump with a head/relation/tail/weight header (tab separated
// for .tsv, comma otherwise), or a raw ConceptNet assertions file (five
// tab-separated columns, no header). Non-English ConceptNet edges are
// skipped. Negative or malformed weights raise LoadError.
std::vector<KnowledgeTuple> LoadTupleDump(const std::filesystem::path &path);

// One tuple per line: either linearized text or head<TAB>relation<TAB>tail.
std::vector<KnowledgeTuple> LoadLinearizedTuples(const std::filesystem::path &path);
std::vector<KnowledgeTuple> ParseLinearizedTuples(const std::vector<std::string> &lines);

// Inverted index from concept lemma to the ids of tuples whose head or
// tail is that concept.
class KnowledgeIndex {
 public:
  static KnowledgeIndex Build(std::vector<KnowledgeTuple> tuples);

  // Directory layout: tuples.tsv, postings.tsv, meta.json.
  void Save(const std::filesystem::path &dir) const;
  static KnowledgeIndex Load(const std::filesystem::path &dir);

  const std::vector<KnowledgeTuple> &tuples() const { return tuples_; }
  const std::vector<uint32_t> &Postings(const std::string &lemma) const;
  size_t lemma_count() const { return postings_.size(); }
  // Content hash of the tuples, used to key caches.
  const std::string &id() const { return id_; }
  // Lemmatizer seeded with the graph's single-word concepts. Queries must
  // use it so both sides normalize words the same way.
  const Lemmatizer &lemmatizer() const { return lemmatizer_; }

 private:
  void Finish();

  std::vector<KnowledgeTuple> tuples_;
  std::map<std::string, std::vector<uint32_t>> postings_;
  std::string id_;
  Lemmatizer lemmatizer_;
};

// Single-word concept surface forms of a tuple set.
std::unordered_set<std::string> ConceptVocabulary(const std::vector<KnowledgeTuple> &tuples);
// Lemma key of a concept: each word lemmatized, joined with spaces.
std::string ConceptKey(std::string_view node, const Lemmatizer &lemmatizer);

enum class Scorer { kIdfRelevance, kCosine };
std::string ScorerName(Scorer scorer);

struct ScoredTuple {
  KnowledgeTuple tuple;
  double score = 0.0;
  Scorer scorer = Scorer::kIdfRelevance;
  // Query token that produced the score (relevance scoring only).
  std::string matched_token;
};

// Score descending, tuple id ascending.
void SortRanking(std::vector<ScoredTuple> &ranking);

// Every tuple in the 1-hop neighbourhood of a query token, scored
// idf(token) * weight, keeping the best score per tuple.
std::vector<ScoredTuple> RetrieveByRelevance(const QueryTokens &query,
                                             const KnowledgeIndex &index);

// Tuples with their sentence embeddings computed once up front.
class EmbeddedTuples {
 public:
  EmbeddedTuples(std::vector<KnowledgeTuple> tuples, const embedding::TextEncoder &encoder);

  const std::vector<KnowledgeTuple> &tuples() const { return tuples_; }
  const Eigen::MatrixXd &embeddings() const { return embeddings_; }
  int dim() const { return static_cast<int>(embeddings_.cols()); }
  const std::string &encoder_name() const { return encoder_name_; }
  std::string id() const;

 private:
  std::vector<KnowledgeTuple> tuples_;
  Eigen::MatrixXd embeddings_;
  std::string encoder_name_;
};

// Raw cosine between the post and every tuple. ShapeError when the post
// embedding width differs from the tuple embeddings.
std::vector<ScoredTuple> RetrieveBySimilarity(const Eigen::VectorXd &post_embedding,
                                              const EmbeddedTuples &tuples);
std::vector<ScoredTuple> RetrieveBySimilarity(const std::string &post,
                                              const EmbeddedTuples &tuples,
                                              const embedding::TextEncoder &encoder);

enum class SelectionMode { kTop, kBottom, kRandom };
std::string SelectionModeName(SelectionMode mode);
SelectionMode ParseSelectionMode(const std::string &name);

struct RetrievalSelection {
  SelectionMode mode = SelectionMode::kTop;
  int k = 20;
  std::optional<uint64_t> seed;

  void Validate() const;
  Json ToJson() const;
  static RetrievalSelection FromJson(const Json &j);
};

struct Selection {
  // top: best first; bottom: worst first; random: in ranking order.
  std::vector<ScoredTuple> tuples;
  // Fewer than k tuples were available.
  bool shortfall = false;
};

Selection SelectK(std::vector<ScoredTuple> ranking, const RetrievalSelection &selection);

// Counts tokens the way the downstream model will.
using TokenCounter = std::function<size_t(const std::string &)>;
size_t WhitespaceTokenCount(const std::string &text);

// "post [SEP] t1 [SEP] t2 ..." holding at most `max_tokens` tokens. Tuples
// are dropped from the tail until the text fits; the post itself is never
// cut (the model truncates it if it alone is too long). max_tokens 0
// disables the limit.
std::string BuildKgInput(const std::string &post, const std::vector<std::string> &tuples,
                         size_t max_tokens = 0,
                         const TokenCounter &count = WhitespaceTokenCount);

struct CacheKey {
  std::string post_id;
  std::string kg_id;
  Scorer scorer = Scorer::kIdfRelevance;
  RetrievalSelection selection;

  std::string ToString() const;
};

struct CacheEntry {
  CacheKey key;
  std::vector<std::string> tuples;
  std::vector<double> scores;
  bool shortfall = false;

  Json ToJson() const;
  static CacheEntry FromJson(const Json &j);
};

// Append-only JSON-lines cache of selections.
class RetrievalCache {
 public:
  explicit RetrievalCache(std::filesystem::path path);

  const CacheEntry *Find(const CacheKey &key) const;
  // Appends one line and flushes; later entries for a key win on reload.
  void Append(const CacheEntry &entry);
  size_t size() const { return entries_.size(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::map<std::string, CacheEntry> entries_;
};

}  // namespace toxexplain::kg_retrieval

#endif  // TOXEXPLAIN_KG_RETRIEVAL_RETRIEVAL_H_
