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

#include "toxexplain/kg_retrieval/retrieval.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::kg_retrieval {
namespace {

constexpr char kIndexFormat[] = "toxexplain-kg-index-1";

std::string FormatWeight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

double ParseWeight(const std::string &text, const std::string &where) {
  double w;
  try {
    size_t used = 0;
    w = std::stod(text, &used);
    if (used != Trim(text).size()) throw std::invalid_argument("trailing");
  } catch (const std::exception &) {
    throw LoadError(where + ": bad weight '" + text + "'");
  }
  if (!(w >= 0.0)) throw LoadError(where + ": weight must be nonnegative, got " + text);
  return w;
}

std::string TuplesHash(const std::vector<KnowledgeTuple> &tuples) {
  uint64_t h = Fnv1a64("kg");
  for (const auto &t : tuples) {
    h = Fnv1a64(t.head + '\t' + t.relation + '\t' + t.tail + '\t' + FormatWeight(t.weight) +
                    '\t' + t.linearized + '\n',
                h);
  }
  return ToHex(h);
}

KnowledgeTuple MakeTuple(uint32_t id, std::string head, std::string relation,
                         std::string tail, double weight) {
  KnowledgeTuple t;
  t.id = id;
  t.linearized = Linearize(head, relation, tail);
  t.head = std::move(head);
  t.relation = std::move(relation);
  t.tail = std::move(tail);
  t.weight = weight;
  return t;
}

std::vector<KnowledgeTuple> ParseAssertions(const std::string &content,
                                            const std::string &name) {
  std::vector<KnowledgeTuple> out;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    std::vector<std::string> f = Split(line, '\t');
    if (f.size() != 5) throw LoadError(where + ": expected 5 tab-separated columns");
    if (!StartsWith(f[2], "/c/en/") || !StartsWith(f[3], "/c/en/")) continue;
    double weight = 1.0;
    try {
      Json meta = Json::parse(f[4]);
      weight = meta.value("weight", 1.0);
    } catch (const Json::exception &e) {
      throw LoadError(where + ": bad edge metadata: " + e.what());
    }
    if (!(weight >= 0.0)) throw LoadError(where + ": weight must be nonnegative");
    out.push_back(MakeTuple(static_cast<uint32_t>(out.size()), f[2], f[1], f[3], weight));
  }
  return out;
}

}  // namespace

std::string ConceptText(std::string_view node) {
  std::string text(node);
  if (StartsWith(text, "/c/")) {
    std::vector<std::string> parts = Split(text, '/');
    // "", "c", "en", "term", optional pos...
    text = parts.size() > 3 ? parts[3] : "";
  }
  std::replace(text.begin(), text.end(), '_', ' ');
  return NormalizeSpace(ToLowerAscii(text));
}

std::string RelationText(std::string_view relation) {
  std::string rel(relation);
  if (StartsWith(rel, "/r/")) rel = rel.substr(3);
  std::string out;
  for (size_t i = 0; i < rel.size(); ++i) {
    const char c = rel[i];
    if (c == '_' || c == '/') {
      out.push_back(' ');
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      if (i > 0) out.push_back(' ');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back(c);
    }
  }
  return NormalizeSpace(out);
}

std::string Linearize(std::string_view head, std::string_view relation,
                      std::string_view tail) {
  return NormalizeSpace(ConceptText(head) + " " + RelationText(relation) + " " +
                        ConceptText(tail));
}

std::vector<KnowledgeTuple> LoadTupleDump(const std::filesystem::path &path) {
  const std::string content = ReadFile(path);
  const std::string name = path.string();
  if (StartsWith(content, "/a/")) return ParseAssertions(content, name);
  const std::string first_line = content.substr(0, content.find('\n'));
  const char delim = first_line.find('\t') != std::string::npos ? '\t' : ',';
  DelimitedTable table = ParseDelimited(content, delim);
  const int head = table.Column("head"), rel = table.Column("relation"),
            tail = table.Column("tail"), weight = table.Column("weight");
  for (auto [col, label] : {std::pair{head, "head"}, {rel, "relation"}, {tail, "tail"},
                            {weight, "weight"}}) {
    if (col < 0) throw LoadError(name + ": missing column '" + label + "'");
  }
  std::vector<KnowledgeTuple> out;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = name + ":" + std::to_string(table.lines[r]);
    if (row.size() != table.header.size()) {
      throw LoadError(where + ": expected " + std::to_string(table.header.size()) +
                      " fields, got " + std::to_string(row.size()));
    }
    KnowledgeTuple t = MakeTuple(static_cast<uint32_t>(out.size()), row[head], row[rel],
                                 row[tail], ParseWeight(row[weight], where));
    if (t.linearized.empty()) throw LoadError(where + ": empty tuple");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<KnowledgeTuple> ParseLinearizedTuples(const std::vector<std::string> &lines) {
  std::vector<KnowledgeTuple> out;
  for (const std::string &raw : lines) {
    std::string line = Trim(raw);
    if (line.empty()) continue;
    std::vector<std::string> f = Split(line, '\t');
    KnowledgeTuple t;
    t.id = static_cast<uint32_t>(out.size());
    if (f.size() == 3) {
      t.head = Trim(f[0]);
      t.relation = Trim(f[1]);
      t.tail = Trim(f[2]);
      t.linearized = NormalizeSpace(t.head + " " + t.relation + " " + t.tail);
    } else {
      t.linearized = NormalizeSpace(line);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<KnowledgeTuple> LoadLinearizedTuples(const std::filesystem::path &path) {
  std::vector<std::string> lines = Split(ReadFile(path), '\n');
  std::vector<KnowledgeTuple> out = ParseLinearizedTuples(lines);
  if (out.empty()) throw LoadError(path.string() + ": no tuples");
  return out;
}

std::unordered_set<std::string> ConceptVocabulary(const std::vector<KnowledgeTuple> &tuples) {
  std::unordered_set<std::string> vocab;
  for (const auto &t : tuples) {
    for (const std::string *c : {&t.head, &t.tail}) {
      std::string text = ConceptText(*c);
      if (!text.empty() && text.find(' ') == std::string::npos) vocab.insert(text);
    }
  }
  return vocab;
}

std::string ConceptKey(std::string_view node, const Lemmatizer &lemmatizer) {
  std::vector<std::string> words = SplitWhitespace(ConceptText(node));
  for (auto &w : words) w = lemmatizer.Lemma(w);
  return Join(words, " ");
}

KnowledgeIndex KnowledgeIndex::Build(std::vector<KnowledgeTuple> tuples) {
  KnowledgeIndex index;
  index.tuples_ = std::move(tuples);
  for (size_t i = 0; i < index.tuples_.size(); ++i) {
    if (index.tuples_[i].id != i) {
      throw PreconditionError("tuple ids must equal their positions");
    }
  }
  index.Finish();
  for (const auto &t : index.tuples_) {
    std::string head = ConceptKey(t.head, index.lemmatizer_);
    std::string tail = ConceptKey(t.tail, index.lemmatizer_);
    if (!head.empty()) index.postings_[head].push_back(t.id);
    if (!tail.empty() && tail != head) index.postings_[tail].push_back(t.id);
  }
  return index;
}

void KnowledgeIndex::Finish() {
  id_ = TuplesHash(tuples_);
  lemmatizer_ = Lemmatizer(ConceptVocabulary(tuples_));
}

const std::vector<uint32_t> &KnowledgeIndex::Postings(const std::string &lemma) const {
  static const std::vector<uint32_t> kEmpty;
  auto it = postings_.find(lemma);
  return it == postings_.end() ? kEmpty : it->second;
}

void KnowledgeIndex::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  std::string tuples = FormatDelimitedRow(
      {"id", "head", "relation", "tail", "weight", "linearized"}, '\t') + "\n";
  for (const auto &t : tuples_) {
    tuples += FormatDelimitedRow({std::to_string(t.id), t.head, t.relation, t.tail,
                                  FormatWeight(t.weight), t.linearized},
                                 '\t') +
              "\n";
  }
  WriteFileAtomic(dir / "tuples.tsv", tuples);
  std::string postings;
  for (const auto &[lemma, ids] : postings_) {
    postings += lemma + '\t';
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) postings += ',';
      postings += std::to_string(ids[i]);
    }
    postings += '\n';
  }
  WriteFileAtomic(dir / "postings.tsv", postings);
  WriteJsonAtomic(dir / "meta.json", Json{{"format", kIndexFormat},
                                          {"id", id_},
                                          {"tuples", tuples_.size()},
                                          {"lemmas", postings_.size()}});
}

KnowledgeIndex KnowledgeIndex::Load(const std::filesystem::path &dir) {
  for (const char *f : {"meta.json", "tuples.tsv", "postings.tsv"}) {
    if (!std::filesystem::exists(dir / f)) {
      throw MissingArtifactError("knowledge index " + dir.string() + " lacks " + f +
                                 "; run kg-index first");
    }
  }
  Json meta = ReadJson(dir / "meta.json");
  if (meta.value("format", "") != kIndexFormat) {
    throw LoadError((dir / "meta.json").string() + ": unsupported index format");
  }
  KnowledgeIndex index;
  DelimitedTable table = ReadDelimited(dir / "tuples.tsv", '\t');
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = (dir / "tuples.tsv").string() + ":" +
                              std::to_string(table.lines[r]);
    if (row.size() != 6) throw LoadError(where + ": expected 6 fields");
    KnowledgeTuple t;
    t.id = static_cast<uint32_t>(std::stoul(row[0]));
    if (t.id != index.tuples_.size()) throw LoadError(where + ": ids out of order");
    t.head = row[1];
    t.relation = row[2];
    t.tail = row[3];
    t.weight = ParseWeight(row[4], where);
    t.linearized = row[5];
    index.tuples_.push_back(std::move(t));
  }
  index.Finish();
  if (index.id_ != meta.value("id", "")) {
    throw LoadError(dir.string() + ": tuples do not match the recorded index id");
  }
  std::istringstream in(ReadFile(dir / "postings.tsv"));
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    const std::string where = (dir / "postings.tsv").string() + ":" + std::to_string(line_no);
    if (tab == std::string::npos) throw LoadError(where + ": expected lemma<TAB>ids");
    std::vector<uint32_t> &ids = index.postings_[line.substr(0, tab)];
    for (const std::string &id : Split(line.substr(tab + 1), ',')) {
      unsigned long v;
      try {
        v = std::stoul(id);
      } catch (const std::exception &) {
        throw LoadError(where + ": bad tuple id '" + id + "'");
      }
      if (v >= index.tuples_.size()) throw LoadError(where + ": tuple id out of range");
      ids.push_back(static_cast<uint32_t>(v));
    }
  }
  return index;
}

std::string ScorerName(Scorer scorer) {
  return scorer == Scorer::kIdfRelevance ? "idf_relevance" : "cosine";
}

void SortRanking(std::vector<ScoredTuple> &ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const ScoredTuple &a, const ScoredTuple &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tuple.id < b.tuple.id;
  });
}

std::vector<ScoredTuple> RetrieveByRelevance(const QueryTokens &query,
                                             const KnowledgeIndex &index) {
  std::map<uint32_t, ScoredTuple> best;
  for (const std::string &token : query.tokens) {
    auto idf = query.idf.find(token);
    if (idf == query.idf.end()) {
      throw PreconditionError("query token '" + token + "' has no idf value");
    }
    for (uint32_t id : index.Postings(token)) {
      const KnowledgeTuple &t = index.tuples()[id];
      const double score = idf->second * t.weight;
      auto it = best.find(id);
      if (it == best.end() || score > it->second.score) {
        best[id] = ScoredTuple{t, score, Scorer::kIdfRelevance, token};
      }
    }
  }
  std::vector<ScoredTuple> out;
  out.reserve(best.size());
  for (auto &[id, st] : best) out.push_back(std::move(st));
  SortRanking(out);
  return out;
}

EmbeddedTuples::EmbeddedTuples(std::vector<KnowledgeTuple> tuples,
                               const embedding::TextEncoder &encoder)
    : tuples_(std::move(tuples)), encoder_name_(encoder.name()) {
  embeddings_.resize(static_cast<Eigen::Index>(tuples_.size()), encoder.dim());
  for (size_t i = 0; i < tuples_.size(); ++i) {
    embeddings_.row(static_cast<Eigen::Index>(i)) =
        encoder.EmbedSentence(tuples_[i].linearized).transpose();
  }
}

std::string EmbeddedTuples::id() const {
  uint64_t h = Fnv1a64(encoder_name_);
  for (const auto &t : tuples_) h = Fnv1a64(t.linearized + '\n', h);
  return ToHex(h);
}

std::vector<ScoredTuple> RetrieveBySimilarity(const Eigen::VectorXd &post_embedding,
                                              const EmbeddedTuples &tuples) {
  if (post_embedding.size() != tuples.dim()) {
    throw ShapeError("post embedding has " + std::to_string(post_embedding.size()) +
                     " components but tuple embeddings have " +
                     std::to_string(tuples.dim()));
  }
  std::vector<ScoredTuple> out;
  out.reserve(tuples.tuples().size());
  for (size_t i = 0; i < tuples.tuples().size(); ++i) {
    const Eigen::VectorXd row =
        tuples.embeddings().row(static_cast<Eigen::Index>(i)).transpose();
    out.push_back(ScoredTuple{tuples.tuples()[i], embedding::Cosine(post_embedding, row),
                              Scorer::kCosine, ""});
  }
  SortRanking(out);
  return out;
}

std::vector<ScoredTuple> RetrieveBySimilarity(const std::string &post,
                                              const EmbeddedTuples &tuples,
                                              const embedding::TextEncoder &encoder) {
  return RetrieveBySimilarity(encoder.EmbedSentence(post), tuples);
}

std::string SelectionModeName(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kTop:
      return "top";
    case SelectionMode::kBottom:
      return "bottom";
    case SelectionMode::kRandom:
      return "random";
  }
  return "top";
}

SelectionMode ParseSelectionMode(const std::string &name) {
  if (name == "top") return SelectionMode::kTop;
  if (name == "bottom") return SelectionMode::kBottom;
  if (name == "random") return SelectionMode::kRandom;
  throw PreconditionError("unknown selection mode '" + name +
                          "' (expected top, bottom or random)");
}

void RetrievalSelection::Validate() const {
  if (k < 1) throw PreconditionError("k must be at least 1, got " + std::to_string(k));
  if (mode == SelectionMode::kRandom && !seed) {
    throw PreconditionError("random selection needs a seed");
  }
}

Json RetrievalSelection::ToJson() const {
  Json j{{"mode", SelectionModeName(mode)}, {"k", k}};
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  return j;
}

RetrievalSelection RetrievalSelection::FromJson(const Json &j) {
  RetrievalSelection s;
  s.mode = ParseSelectionMode(j.value("mode", "top"));
  s.k = j.value("k", 20);
  if (j.contains("seed") && !j["seed"].is_null()) s.seed = j["seed"].get<uint64_t>();
  s.Validate();
  return s;
}

Selection SelectK(std::vector<ScoredTuple> ranking, const RetrievalSelection &selection) {
  selection.Validate();
  SortRanking(ranking);
  const size_t n = ranking.size();
  const size_t take = std::min(n, static_cast<size_t>(selection.k));
  Selection out;
  out.shortfall = n < static_cast<size_t>(selection.k);
  switch (selection.mode) {
    case SelectionMode::kTop:
      out.tuples.assign(ranking.begin(), ranking.begin() + take);
      break;
    case SelectionMode::kBottom:
      out.tuples.assign(ranking.rbegin(), ranking.rbegin() + take);
      break;
    case SelectionMode::kRandom: {
      std::vector<size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 rng(*selection.seed);
      // Partial Fisher-Yates.
      for (size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
      }
      order.resize(take);
      std::sort(order.begin(), order.end());
      for (size_t i : order) out.tuples.push_back(ranking[i]);
      break;
    }
  }
  return out;
}

size_t WhitespaceTokenCount(const std::string &text) { return SplitWhitespace(text).size(); }

std::string BuildKgInput(const std::string &post, const std::vector<std::string> &tuples,
                         size_t max_tokens, const TokenCounter &count) {
  std::string text = post;
  const std::string sep = " " + std::string(kSeparatorToken) + " ";
  for (const std::string &t : tuples) {
    std::string candidate = text + sep + t;
    if (max_tokens != 0 && count(candidate) > max_tokens) break;
    text = std::move(candidate);
  }
  return text;
}

std::string CacheKey::ToString() const {
  return post_id + '\x1f' + kg_id + '\x1f' + ScorerName(scorer) + '\x1f' +
         SelectionModeName(selection.mode) + '\x1f' + std::to_string(selection.k) + '\x1f' +
         (selection.seed ? std::to_string(*selection.seed) : "-");
}

Json CacheEntry::ToJson() const {
  Json j{{"post_id", key.post_id},
         {"kg_id", key.kg_id},
         {"scorer", ScorerName(key.scorer)},
         {"mode", SelectionModeName(key.selection.mode)},
         {"k", key.selection.k}};
  j["seed"] = key.selection.seed ? Json(*key.selection.seed) : Json(nullptr);
  j["tuples"] = tuples;
  j["scores"] = scores;
  j["shortfall"] = shortfall;
  return j;
}

CacheEntry CacheEntry::FromJson(const Json &j) {
  CacheEntry e;
  e.key.post_id = j.at("post_id").get<std::string>();
  e.key.kg_id = j.at("kg_id").get<std::string>();
  const std::string scorer = j.at("scorer").get<std::string>();
  if (scorer == "idf_relevance") {
    e.key.scorer = Scorer::kIdfRelevance;
  } else if (scorer == "cosine") {
    e.key.scorer = Scorer::kCosine;
  } else {
    throw LoadError("unknown scorer '" + scorer + "'");
  }
  e.key.selection = RetrievalSelection::FromJson(j);
  e.tuples = j.at("tuples").get<std::vector<std::string>>();
  e.scores = j.at("scores").get<std::vector<double>>();
  e.shortfall = j.value("shortfall", false);
  if (e.tuples.size() != e.scores.size()) throw LoadError("tuples and scores differ in length");
  return e;
}

RetrievalCache::RetrievalCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  std::vector<std::string> lines = Split(ReadFile(path_), '\n');
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      CacheEntry e = CacheEntry::FromJson(Json::parse(lines[i]));
      entries_[e.key.ToString()] = std::move(e);
    } catch (const std::exception &err) {
      // An interrupted append leaves a partial final line; drop it.
      if (i + 1 == lines.size()) break;
      throw LoadError(path_.string() + ":" + std::to_string(i + 1) + ": " + err.what());
    }
  }
}

const CacheEntry *RetrievalCache::Find(const CacheKey &key) const {
  auto it = entries_.find(key.ToString());
  return it == entries_.end() ? nullptr : &it->second;
}

void RetrievalCache::Append(const CacheEntry &entry) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const std::string line = entry.ToJson().dump() + "\n";
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw LoadError("cannot open " + path_.string() + " for appending");
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw LoadError("failed writing " + path_.string());
  entries_[entry.key.ToString()] = entry;
}

}  // namespace toxexplain::kg_retrieval
