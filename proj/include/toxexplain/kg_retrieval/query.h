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

#ifndef TOXEXPLAIN_KG_RETRIEVAL_QUERY_H_
#define TOXEXPLAIN_KG_RETRIEVAL_QUERY_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace toxexplain::kg_retrieval {

// Rule-based English lemmatizer: an irregular-form table followed by
// suffix stripping. When a set of known lemmas is supplied (typically the
// knowledge graph's single-word concepts), the first candidate found in it
// wins; otherwise the primary rule output is used.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  explicit Lemmatizer(std::unordered_set<std::string> known);

  // `word` is expected lowercase.
  std::string Lemma(std::string_view word) const;
  // Primary rule output first, the unchanged word last.
  std::vector<std::string> Candidates(std::string_view word) const;

  const std::unordered_set<std::string> &known() const { return known_; }

 private:
  std::unordered_set<std::string> known_;
};

enum class PartOfSpeech { kNoun, kVerb, kAdjective, kAdverb, kFunction, kOther };

// Heuristic coarse tagger for content-word filtering. Closed-class words
// come from a fixed list, -ly words are adverbs unless listed as
// adjectives, and everything else alphabetic counts as a content word.
// A lexicon (word -> tag) overrides the heuristics.
class ContentWordTagger {
 public:
  ContentWordTagger() = default;
  explicit ContentWordTagger(std::unordered_map<std::string, PartOfSpeech> lexicon);

  // Lexicon file: one "word<TAB>TAG" per line, TAG in NOUN VERB ADJ ADV
  // FUNC OTHER.
  static ContentWordTagger LoadLexicon(const std::filesystem::path &path);

  PartOfSpeech Tag(std::string_view word) const;
  bool IsContentWord(std::string_view word) const;

 private:
  std::unordered_map<std::string, PartOfSpeech> lexicon_;
};

// Lowercased word tokens of a preprocessed post. Placeholders such as
// <url> are skipped and possessive 's is removed.
std::vector<std::string> WordTokens(std::string_view post);

class QueryExtractor {
 public:
  QueryExtractor() = default;
  QueryExtractor(Lemmatizer lemmatizer, ContentWordTagger tagger)
      : lemmatizer_(std::move(lemmatizer)), tagger_(std::move(tagger)) {}

  // Sorted, deduplicated noun/verb/adjective lemmas. Empty for an empty post.
  std::vector<std::string> Extract(std::string_view post) const;

  const Lemmatizer &lemmatizer() const { return lemmatizer_; }

 private:
  Lemmatizer lemmatizer_;
  ContentWordTagger tagger_;
};

// Inverse document frequency over the query-token sets of a post corpus.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(size_t documents, std::map<std::string, size_t> document_frequency);

  // log(N / df), with df floored at 1 for tokens never seen.
  double Idf(const std::string &token) const;
  size_t documents() const { return documents_; }
  size_t DocumentFrequency(const std::string &token) const;

  void Save(const std::filesystem::path &path) const;
  static IdfTable Load(const std::filesystem::path &path);

 private:
  size_t documents_ = 0;
  std::map<std::string, size_t> df_;
};

// Throws PreconditionError on an empty corpus.
IdfTable ComputeIdf(const std::vector<std::string> &posts,
                    const QueryExtractor &extractor);

struct QueryTokens {
  std::vector<std::string> tokens;
  std::map<std::string, double> idf;
};

QueryTokens MakeQuery(std::string_view post, const QueryExtractor &extractor,
                      const IdfTable &idf);

}  // namespace toxexplain::kg_retrieval

#endif  // TOXEXPLAIN_KG_RETRIEVAL_QUERY_H_
