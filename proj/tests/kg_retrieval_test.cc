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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "toxexplain/common/errors.h"
#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"
#include "toxexplain/embedding/encoder.h"
#include "toxexplain/kg_retrieval/query.h"
#include "toxexplain/kg_retrieval/retrieval.h"
#include "toxexplain/synth/synth.h"
#include "oracle_retrieval.h"

namespace toxexplain::kg_retrieval {
namespace {

namespace fs = std::filesystem;
using Set = std::vector<std::string>;

fs::path TempDir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / ("toxexplain_kg_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Set Sorted(Set s) {
  std::sort(s.begin(), s.end());
  return s;
}

// Distinct post texts of a synthetic explanation table.
std::vector<std::string> SynthPosts(size_t count, uint64_t seed) {
  synth::ExplanationCorpusOptions opts;
  opts.train_posts = count;
  opts.test_posts = 0;
  opts.seed = seed;
  DelimitedTable table = ParseDelimited(synth::MakeExplanationTable(opts), ',');
  const int id = table.Column("post_id"), post = table.Column("post");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto &row : table.rows) {
    if (seen.insert(row[id]).second) out.push_back(row[post]);
  }
  return out;
}

TEST_CASE("query extraction keeps noun, verb and adjective lemmas") {
  // Hand-tagged expectations.
  const std::vector<std::pair<std::string, Set>> fixture = {
      {"dogs bark loudly", {"bark", "dog"}},
      {"the of and", {}},
      {"cats chase mice in the garden", {"cat", "chase", "garden", "mouse"}},
      {"those people are running away from the police", {"person", "police", "run"}},
      {"she hated the noisy neighbors", {"hate", "neighbor", "noisy"}},
      {"they stole money and bought cheap cars", {"buy", "car", "cheap", "money", "steal"}},
      {"women deserve better jobs", {"deserve", "good", "job", "woman"}},
      {"he quickly fixed the old fence", {"fence", "fix", "old"}},
      {"immigrants are taking our jobs", {"immigrant", "job", "take"}},
      {"the lazy workers were sleeping all day", {"day", "lazy", "sleep", "worker"}},
      {"<user> check this out <url>", {"check"}},
      {"my neighbor's dogs barked constantly", {"bark", "dog", "neighbor"}},
      {"children love ugly toys", {"child", "love", "toy", "ugly"}},
      {"she carries heavy boxes", {"box", "carry", "heavy"}},
      {"they are planning to stop immigration", {"immigration", "plan", "stop"}},
      {"the churches were burned", {"burn", "church"}},
      {"criminals hide in dark places", {"criminal", "dark", "hide", "place"}},
      {"I really hate those smelly people!!", {"hate", "person", "smelly"}},
      {"voting should be banned for them", {"ban", "vote"}},
      {"lol they're so stupid and dangerous", {"dangerous", "stupid"}},
  };
  QueryExtractor extractor;
  for (const auto &[post, expected] : fixture) {
    CAPTURE(post);
    CHECK(extractor.Extract(post) == Sorted(expected));
  }
  CHECK(extractor.Extract("").empty());
  CHECK(extractor.Extract("dog dogs DOG dog.") == Set{"dog"});
}

TEST_CASE("known lemmas steer ambiguous suffix stripping") {
  Lemmatizer plain;
  CHECK(plain.Lemma("hoping") == "hope");
  CHECK(Lemmatizer({"hop"}).Lemma("hoping") == "hop");
  CHECK(plain.Lemma("visiting") == "visit");
  CHECK(plain.Lemma("morning") == "morning");
  CHECK(plain.Lemma("glass") == "glass");
  CHECK(plain.Lemma("parties") == "party");
}

TEST_CASE("a lexicon overrides the heuristic tagger") {
  fs::path dir = TempDir("lexicon");
  {
    std::ofstream(dir / "lex.tsv") << "loudly\tADJ\ndogs\tFUNC\n";
  }
  QueryExtractor extractor(Lemmatizer(), ContentWordTagger::LoadLexicon(dir / "lex.tsv"));
  CHECK(extractor.Extract("dogs bark loudly") == Set{"bark", "loudly"});
  {
    std::ofstream(dir / "bad.tsv") << "dogs\tPLURAL\n";
  }
  CHECK_THROWS_AS(ContentWordTagger::LoadLexicon(dir / "bad.tsv"), LoadError);
}

TEST_CASE("idf matches a brute-force document count") {
  QueryExtractor extractor;
  std::vector<std::string> posts(100, "common words here");
  posts[7] += " rare";
  IdfTable idf = ComputeIdf(posts, extractor);
  CHECK(idf.Idf("common") == doctest::Approx(0.0));
  CHECK(idf.Idf("rare") == doctest::Approx(std::log(100.0)));
  CHECK(idf.Idf("neverseen") == doctest::Approx(std::log(100.0)));
  CHECK(ComputeIdf({"one lonely post"}, extractor).Idf("post") == doctest::Approx(0.0));
  CHECK_THROWS_AS(ComputeIdf({}, extractor), PreconditionError);

  std::vector<std::string> corpus = SynthPosts(150, 1);
  REQUIRE(corpus.size() == 150);
  IdfTable table = ComputeIdf(corpus, extractor);
  std::map<std::string, size_t> df;
  for (const auto &p : corpus) {
    std::set<std::string> seen;
    for (const auto &t : extractor.Extract(p)) seen.insert(t);
    for (const auto &t : seen) ++df[t];
  }
  REQUIRE(!df.empty());
  for (const auto &[tok, count] : df) {
    CHECK(table.DocumentFrequency(tok) == count);
    CHECK(table.Idf(tok) == doctest::Approx(std::log(double(corpus.size()) / count)));
    CHECK(table.Idf(tok) >= 0.0);
  }

  fs::path dir = TempDir("idf");
  table.Save(dir / "idf.json");
  IdfTable back = IdfTable::Load(dir / "idf.json");
  for (const auto &[tok, count] : df) CHECK(back.Idf(tok) == table.Idf(tok));
}

std::vector<KnowledgeTuple> ToyGraph() {
  const char *tsv =
      "head\trelation\ttail\tweight\n"
      "dog\tIsA\tanimal\t2\n"
      "dog\tCapableOf\tbark\t1\n"
      "cat\tIsA\tanimal\t2\n"
      "bark\tPartOf\ttree\t1.5\n"
      "tree\tAtLocation\tforest\t1\n"
      "dog\tRelatedTo\tleash\t0.5\n"
      "animal\tRelatedTo\tzoo\t1\n"
      "bark\tRelatedTo\tdog\t3\n"
      "cat\tDesires\tfish\t1\n"
      "forest\tHasProperty\tdark\t1\n";
  fs::path dir = TempDir("toy");
  WriteFileAtomic(dir / "toy.tsv", tsv);
  return LoadTupleDump(dir / "toy.tsv");
}

TEST_CASE("relevance ranking on a toy graph equals exhaustive scoring") {
  std::vector<KnowledgeTuple> tuples = ToyGraph();
  REQUIRE(tuples.size() == 10);
  CHECK(tuples[0].linearized == "dog is a animal");
  KnowledgeIndex index = KnowledgeIndex::Build(tuples);
  QueryTokens q;
  q.tokens = {"bark", "dog"};
  q.idf = {{"bark", 1.2}, {"dog", 0.7}};
  auto ranked = RetrieveByRelevance(q, index);
  auto oracle = testing::BruteForceRelevance(tuples, q, index.lemmatizer());
  REQUIRE(ranked.size() == oracle.size());
  REQUIRE(ranked.size() == 5);
  for (size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].tuple.id == oracle[i].first);
    CHECK(ranked[i].score == oracle[i].second);
  }
  // "bark RelatedTo dog" is reached by both tokens and keeps the larger.
  CHECK(ranked[0].tuple.id == 7);
  CHECK(ranked[0].score == doctest::Approx(3.6));
  CHECK(ranked[0].matched_token == "bark");

  QueryTokens none;
  none.tokens = {"spaceship"};
  none.idf = {{"spaceship", 4.0}};
  CHECK(RetrieveByRelevance(none, index).empty());
}

TEST_CASE("relevance ranking on a synthetic graph equals exhaustive scoring") {
  synth::KnowledgeGraphOptions kg;
  kg.tuples = 100;
  kg.seed = 5;
  fs::path dir = TempDir("synthkg");
  WriteFileAtomic(dir / "kg.tsv", synth::MakeConceptNetStyleTsv(kg));
  std::vector<KnowledgeTuple> tuples = LoadTupleDump(dir / "kg.tsv");
  REQUIRE(tuples.size() == 100);
  KnowledgeIndex index = KnowledgeIndex::Build(tuples);

  std::vector<std::string> posts = SynthPosts(20, 2);
  REQUIRE(posts.size() == 20);
  QueryExtractor extractor(index.lemmatizer(), ContentWordTagger());
  IdfTable idf = ComputeIdf(posts, extractor);
  size_t nonempty = 0;
  for (const auto &post : posts) {
    CAPTURE(post);
    QueryTokens q = MakeQuery(post, extractor, idf);
    auto ranked = RetrieveByRelevance(q, index);
    auto oracle = testing::BruteForceRelevance(tuples, q, index.lemmatizer());
    REQUIRE(ranked.size() == oracle.size());
    for (size_t i = 0; i < ranked.size(); ++i) {
      CHECK(ranked[i].tuple.id == oracle[i].first);
      CHECK(ranked[i].score == oracle[i].second);
      // Recompute from the reported token.
      CHECK(ranked[i].score == q.idf.at(ranked[i].matched_token) * ranked[i].tuple.weight);
      CHECK(ranked[i].score >= 0.0);
    }
    nonempty += !ranked.empty();
  }
  CHECK(nonempty > 0);
}

TEST_CASE("index survives a disk round trip and rejects tampering") {
  std::vector<KnowledgeTuple> tuples = ToyGraph();
  KnowledgeIndex index = KnowledgeIndex::Build(tuples);
  fs::path dir = TempDir("index");
  index.Save(dir / "idx");
  KnowledgeIndex back = KnowledgeIndex::Load(dir / "idx");
  CHECK(back.id() == index.id());
  CHECK(back.lemma_count() == index.lemma_count());
  for (const char *lemma : {"dog", "bark", "animal", "forest", "nothing"}) {
    CHECK(back.Postings(lemma) == index.Postings(lemma));
  }
  CHECK(back.tuples()[3].weight == 1.5);

  std::string text = ReadFile(dir / "idx" / "tuples.tsv");
  text.replace(text.find("leash"), 5, "lease");
  WriteFileAtomic(dir / "idx" / "tuples.tsv", text);
  CHECK_THROWS_AS(KnowledgeIndex::Load(dir / "idx"), LoadError);
  CHECK_THROWS_AS(KnowledgeIndex::Load(dir / "absent"), MissingArtifactError);
}

TEST_CASE("tuple dumps validate weights and filter non-English edges") {
  fs::path dir = TempDir("dump");
  WriteFileAtomic(dir / "neg.tsv", "head\trelation\ttail\tweight\na\tIsA\tb\t1\nc\tIsA\td\t-2\n");
  try {
    LoadTupleDump(dir / "neg.tsv");
    FAIL("expected LoadError");
  } catch (const LoadError &e) {
    CHECK(std::string(e.what()).find("neg.tsv:3") != std::string::npos);
  }
  WriteFileAtomic(dir / "nohead.csv", "subject,relation,tail,weight\na,IsA,b,1\n");
  CHECK_THROWS_AS(LoadTupleDump(dir / "nohead.csv"), LoadError);

  WriteFileAtomic(dir / "assertions.csv",
                  "/a/[/r/IsA/,/c/en/ice_cream/n/,/c/en/dessert/]\t/r/IsA\t/c/en/ice_cream/n\t"
                  "/c/en/dessert\t{\"weight\": 2.5}\n"
                  "/a/[/r/IsA/,/c/fr/glace/,/c/en/dessert/]\t/r/IsA\t/c/fr/glace\t"
                  "/c/en/dessert\t{\"weight\": 1.0}\n");
  auto tuples = LoadTupleDump(dir / "assertions.csv");
  REQUIRE(tuples.size() == 1);
  CHECK(tuples[0].linearized == "ice cream is a dessert");
  CHECK(tuples[0].weight == 2.5);
  CHECK(RelationText("HasProperty") == "has property");
  CHECK(ConceptText("/c/en/dog/n") == "dog");
}

Set Words(const std::vector<std::string> &pool, std::mt19937_64 &rng, int n) {
  Set out;
  for (int i = 0; i < n; ++i) out.push_back(pool[rng() % pool.size()]);
  return out;
}

TEST_CASE("similarity ranking equals brute-force cosine") {
  embedding::HashedNgramEncoder encoder(256);
  const std::vector<std::string> pool = {"glorbians", "steal", "jobs", "lazy", "dirty",
                                         "people", "crime", "money", "town", "are",
                                         "always", "bad", "drivers", "smell", "loud"};
  std::mt19937_64 rng(3);
  std::vector<std::string> lines;
  for (int i = 0; i < 50; ++i) lines.push_back(Join(Words(pool, rng, 3 + i % 3), " "));
  EmbeddedTuples tuples(ParseLinearizedTuples(lines), encoder);
  REQUIRE(tuples.tuples().size() == 50);

  for (int trial = 0; trial < 10; ++trial) {
    const std::string post = Join(Words(pool, rng, 6), " ");
    auto ranked = RetrieveBySimilarity(post, tuples, encoder);
    REQUIRE(ranked.size() == 50);
    const embedding::Vector p = encoder.EmbedSentence(post);
    std::vector<std::pair<uint32_t, double>> oracle;
    for (const auto &t : tuples.tuples()) {
      const embedding::Vector v = encoder.EmbedSentence(t.linearized);
      double dot = 0, np = 0, nv = 0;
      for (int i = 0; i < p.size(); ++i) {
        dot += p[i] * v[i];
        np += p[i] * p[i];
        nv += v[i] * v[i];
      }
      oracle.emplace_back(t.id, dot / std::sqrt(np * nv));
    }
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto &a, const auto &b) { return a.second > b.second + 1e-12; });
    for (size_t i = 0; i < ranked.size(); ++i) {
      CHECK(ranked[i].score == doctest::Approx(oracle[i].second).epsilon(1e-12));
      CHECK(ranked[i].score >= 0.0);
      CHECK(ranked[i].score <= 1.0 + 1e-12);
      CHECK(ranked[i].scorer == Scorer::kCosine);
    }
    // Ordering: non-increasing scores, ids ascending within ties.
    for (size_t i = 1; i < ranked.size(); ++i) {
      CHECK(ranked[i - 1].score >= ranked[i].score);
      if (ranked[i - 1].score == ranked[i].score) {
        CHECK(ranked[i - 1].tuple.id < ranked[i].tuple.id);
      }
    }
  }

  auto self = RetrieveBySimilarity(lines[17], tuples, encoder);
  CHECK(self[0].score == doctest::Approx(1.0));
  CHECK(self[0].tuple.linearized == lines[17]);

  CHECK_THROWS_AS(RetrieveBySimilarity(embedding::Vector::Zero(10), tuples), ShapeError);
}

TEST_CASE("orthogonal static vectors give zero similarity") {
  fs::path dir = TempDir("static");
  WriteFileAtomic(dir / "vec.txt", "alpha 1 0\nbeta 0 1\ngamma -1 0\n");
  auto encoder = embedding::StaticVectorEncoder::Load(dir / "vec.txt");
  CHECK_FALSE(encoder->nonnegative());
  EmbeddedTuples tuples(ParseLinearizedTuples({"beta", "gamma", "alpha"}), *encoder);
  auto ranked = RetrieveBySimilarity("alpha", tuples, *encoder);
  CHECK(ranked[0].tuple.linearized == "alpha");
  CHECK(ranked[1].score == doctest::Approx(0.0));
  // Raw cosine is kept, negatives included.
  CHECK(ranked[2].score == doctest::Approx(-1.0));
  WriteFileAtomic(dir / "ragged.txt", "alpha 1 0\nbeta 0\n");
  CHECK_THROWS_AS(embedding::StaticVectorEncoder::Load(dir / "ragged.txt"), LoadError);
}

std::vector<ScoredTuple> Ranked(const std::vector<double> &scores) {
  std::vector<ScoredTuple> out;
  for (size_t i = 0; i < scores.size(); ++i) {
    ScoredTuple s;
    s.tuple.id = static_cast<uint32_t>(i);
    s.tuple.linearized = "t" + std::to_string(i);
    s.score = scores[i];
    out.push_back(s);
  }
  return out;
}

std::vector<double> Scores(const Selection &s) {
  std::vector<double> out;
  for (const auto &t : s.tuples) out.push_back(t.score);
  return out;
}

TEST_CASE("select k picks top, bottom and seeded random tuples") {
  auto ranked = Ranked({3, 1, 5, 2, 4});
  CHECK(Scores(SelectK(ranked, {SelectionMode::kTop, 3, {}})) == std::vector<double>{5, 4, 3});
  CHECK(Scores(SelectK(ranked, {SelectionMode::kBottom, 3, {}})) ==
        std::vector<double>{1, 2, 3});
  auto r1 = SelectK(ranked, {SelectionMode::kRandom, 3, 11});
  auto r2 = SelectK(ranked, {SelectionMode::kRandom, 3, 11});
  CHECK(Scores(r1) == Scores(r2));
  CHECK(r1.tuples.size() == 3);
  CHECK_FALSE(r1.shortfall);

  auto few = SelectK(Ranked({0.5, 0.25}), {SelectionMode::kTop, 20, {}});
  CHECK(few.tuples.size() == 2);
  CHECK(few.shortfall);
  CHECK(SelectK({}, {SelectionMode::kBottom, 20, {}}).tuples.empty());

  CHECK_THROWS_AS(SelectK(ranked, {SelectionMode::kTop, 0, {}}), PreconditionError);
  CHECK_THROWS_AS(SelectK(ranked, {SelectionMode::kRandom, 2, {}}), PreconditionError);
}

TEST_CASE("top and bottom selections are disjoint and random picks are uniform") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 20);
    const size_t n = 2 * k + rng() % 20;
    std::vector<double> scores(n);
    std::iota(scores.begin(), scores.end(), 0.0);
    std::shuffle(scores.begin(), scores.end(), rng);
    auto ranked = Ranked(scores);
    auto top = SelectK(ranked, {SelectionMode::kTop, k, {}});
    auto bottom = SelectK(ranked, {SelectionMode::kBottom, k, {}});
    std::set<uint32_t> ids;
    for (const auto &t : top.tuples) ids.insert(t.tuple.id);
    for (const auto &t : bottom.tuples) CHECK(ids.count(t.tuple.id) == 0);
    auto random = SelectK(ranked, {SelectionMode::kRandom, k, rng()});
    std::set<uint32_t> unique;
    for (const auto &t : random.tuples) unique.insert(t.tuple.id);
    CHECK(unique.size() == static_cast<size_t>(k));
  }
  std::vector<int> hits(5, 0);
  auto ranked = Ranked({1, 2, 3, 4, 5});
  for (uint64_t seed = 0; seed < 5000; ++seed) {
    ++hits[SelectK(ranked, {SelectionMode::kRandom, 1, seed}).tuples[0].tuple.id];
  }
  // Binomial(5000, 0.2): mean 1000, sd ~28.
  for (int h : hits) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("kg input joins tuples and drops the tail to fit") {
  CHECK(BuildKgInput("x", {}) == "x");
  CHECK(BuildKgInput("x", {"t1", "t2"}) == "x [SEP] t1 [SEP] t2");

  const std::string post = "one two three four five six seven eight nine ten";
  const std::vector<std::string> tuples = {"a b c d", "e f g h", "i j k l", "m n o p"};
  // Post is 10 tokens; every tuple adds a separator plus 4 tokens.
  for (size_t limit : {10u, 14u, 15u, 19u, 20u, 24u, 25u, 29u, 30u, 100u}) {
    CAPTURE(limit);
    const std::string out = BuildKgInput(post, tuples, limit);
    const size_t fitting = std::min<size_t>(4, (limit - 10) / 5);
    CHECK(WhitespaceTokenCount(out) == 10 + 5 * fitting);
    CHECK(StartsWith(out, post));
  }
  // The post survives even when it alone overflows.
  CHECK(BuildKgInput(post, tuples, 3) == post);
  // A custom counter (characters here) is honoured.
  auto chars = [](const std::string &s) { return s.size(); };
  CHECK(BuildKgInput("ab", {"cd", "ef"}, 12, chars) == "ab [SEP] cd");
}

TEST_CASE("retrieval cache appends, reloads and ignores a torn final line") {
  fs::path dir = TempDir("cache");
  fs::path path = dir / "sub" / "cache.jsonl";
  CacheEntry a;
  a.key = {"p1", "kg1", Scorer::kIdfRelevance, {SelectionMode::kTop, 2, {}}};
  a.tuples = {"dog is a animal", "dog capable of bark"};
  a.scores = {2.0, 1.0};
  CacheEntry b = a;
  b.key.selection = {SelectionMode::kRandom, 2, 7};
  b.scores = {1.0, 2.0};
  {
    RetrievalCache cache(path);
    CHECK(cache.Find(a.key) == nullptr);
    cache.Append(a);
    cache.Append(b);
  }
  {
    std::ofstream(path, std::ios::app) << "{\"post_id\": \"p2\", \"kg";
  }
  RetrievalCache cache(path);
  CHECK(cache.size() == 2);
  REQUIRE(cache.Find(b.key) != nullptr);
  CHECK(cache.Find(b.key)->scores == b.scores);
  CacheKey other = b.key;
  other.selection.seed = 8;
  CHECK(cache.Find(other) == nullptr);

  Json row = a.ToJson();
  for (const char *key : {"post_id", "k", "mode", "tuples", "scores"}) CHECK(row.contains(key));
}

}  // namespace
}  // namespace toxexplain::kg_retrieval
