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

#include "toxexplain/kg_retrieval/query.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"

namespace toxexplain::kg_retrieval {
namespace {

const std::unordered_map<std::string, std::string> &Irregulars() {
  static const auto *table = new std::unordered_map<std::string, std::string>{
      {"men", "man"},          {"women", "woman"},     {"children", "child"},
      {"people", "person"},    {"mice", "mouse"},      {"feet", "foot"},
      {"teeth", "tooth"},      {"geese", "goose"},     {"lives", "life"},
      {"wives", "wife"},       {"knives", "knife"},    {"wolves", "wolf"},
      {"thieves", "thief"},    {"leaves", "leaf"},     {"went", "go"},
      {"gone", "go"},          {"ran", "run"},         {"ate", "eat"},
      {"eaten", "eat"},        {"said", "say"},        {"says", "say"},
      {"made", "make"},        {"took", "take"},       {"taken", "take"},
      {"got", "get"},          {"gotten", "get"},      {"gave", "give"},
      {"given", "give"},       {"knew", "know"},       {"known", "know"},
      {"thought", "think"},    {"brought", "bring"},   {"bought", "buy"},
      {"came", "come"},        {"saw", "see"},         {"seen", "see"},
      {"left", "leave"},       {"felt", "feel"},       {"kept", "keep"},
      {"told", "tell"},        {"found", "find"},      {"stole", "steal"},
      {"stolen", "steal"},     {"drove", "drive"},     {"driven", "drive"},
      {"wrote", "write"},      {"written", "write"},   {"spoke", "speak"},
      {"spoken", "speak"},     {"fought", "fight"},    {"taught", "teach"},
      {"caught", "catch"},     {"sold", "sell"},       {"held", "hold"},
      {"stood", "stand"},      {"understood", "understand"},
      {"sat", "sit"},          {"met", "meet"},        {"paid", "pay"},
      {"lost", "lose"},        {"won", "win"},         {"began", "begin"},
      {"begun", "begin"},      {"broke", "break"},     {"broken", "break"},
      {"chose", "choose"},     {"chosen", "choose"},   {"fell", "fall"},
      {"fallen", "fall"},      {"grew", "grow"},       {"grown", "grow"},
      {"hid", "hide"},         {"hidden", "hide"},     {"built", "build"},
      {"sent", "send"},        {"spent", "spend"},     {"slept", "sleep"},
      {"better", "good"},      {"best", "good"},       {"worse", "bad"},
      {"worst", "bad"},        {"bigger", "big"},      {"biggest", "big"},
      {"dirtier", "dirty"},    {"lazier", "lazy"},     {"news", "news"},
      {"police", "police"},    {"species", "species"}, {"series", "series"},
  };
  return *table;
}

// Words whose -ing / -ed / -s ending is not an inflection.
const std::unordered_set<std::string> &Uninflected() {
  static const auto *words = new std::unordered_set<std::string>{
      "morning", "evening", "thing",  "king",    "ring",   "sing",   "bring",
      "spring",  "string",  "wing",   "ceiling", "during", "nothing",
      "something", "anything", "everything", "sibling", "darling", "pudding",
      "bed",     "red",     "need",   "seed",    "speed",  "feed",   "weed",
      "breed",   "greed",   "proud",  "hundred", "sacred", "naked",  "wicked",
      "bus",     "gas",     "yes",    "this",    "his",    "its",    "us",
      "always",  "series",  "news",   "species", "chaos",  "lens",   "atlas",
      "christmas", "ethics", "politics", "physics", "economics", "mathematics",
  };
  return *words;
}

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool IsConsonantAt(const std::string &w, size_t i) {
  if (IsVowel(w[i])) return false;
  // y after a consonant behaves as a vowel.
  if (w[i] == 'y' && i > 0 && !IsVowel(w[i - 1])) return false;
  return true;
}

// Number of vowel-consonant sequences.
int Measure(const std::string &w) {
  int m = 0;
  bool prev_vowel = false;
  for (size_t i = 0; i < w.size(); ++i) {
    const bool vowel = !IsConsonantAt(w, i);
    if (!vowel && prev_vowel) ++m;
    prev_vowel = vowel;
  }
  return m;
}

bool EndsCvc(const std::string &w) {
  const size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return IsConsonantAt(w, n - 3) && !IsConsonantAt(w, n - 2) &&
         IsConsonantAt(w, n - 1) && last != 'w' && last != 'x' && last != 'y';
}

bool HasVowel(const std::string &w) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (!IsConsonantAt(w, i)) return true;
  }
  return false;
}

// Candidates after removing -ing or -ed, primary first.
std::vector<std::string> UndoVerbSuffix(const std::string &stem) {
  std::vector<std::string> out;
  const size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !IsVowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    out.push_back(stem.substr(0, n - 1));  // running -> run
    out.push_back(stem);
    return out;
  }
  static const char *kRestoreE[] = {"at", "bl", "iz", "nc", "rg", "dg", "us", "v",
                                    "rs", "ns", "uc", "ag"};
  bool restore = Measure(stem) == 1 && EndsCvc(stem);
  for (const char *suffix : kRestoreE) {
    if (EndsWith(stem, suffix)) restore = true;
  }
  if (restore) {
    out.push_back(stem + "e");
    out.push_back(stem);
  } else {
    out.push_back(stem);
    out.push_back(stem + "e");
  }
  return out;
}

const std::unordered_set<std::string> &FunctionWords() {
  static const auto *words = new std::unordered_set<std::string>{
      // determiners and quantifiers
      "a", "an", "the", "this", "that", "these", "those", "some", "any", "no",
      "every", "each", "all", "both", "either", "neither", "much", "many",
      "more", "most", "few", "fewer", "less", "least", "several", "such",
      "other", "another", "own", "same", "enough",
      // pronouns
      "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself",
      "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "we", "us", "our", "ours", "ourselves",
      "they", "them", "their", "theirs", "themselves", "who", "whom", "whose",
      "which", "what", "whatever", "whoever", "someone", "somebody", "anyone",
      "anybody", "everyone", "everybody", "noone", "nobody", "something",
      "anything", "everything", "nothing", "one", "ones", "u", "ur", "ya",
      // prepositions
      "of", "in", "on", "at", "by", "for", "with", "without", "about",
      "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "out", "off", "over",
      "under", "around", "among", "across", "behind", "beyond", "near",
      "onto", "toward", "towards", "upon", "within", "via", "per", "like",
      "unlike", "since", "until", "till", "than", "as", "despite", "except",
      // conjunctions
      "and", "or", "but", "nor", "so", "yet", "if", "because", "although",
      "though", "while", "whereas", "unless", "whether", "when", "where",
      "why", "how", "then", "once",
      // auxiliaries and modals
      "be", "am", "is", "are", "was", "were", "been", "being", "have", "has",
      "had", "having", "do", "does", "did", "doing", "done", "will", "would",
      "shall", "should", "can", "could", "may", "might", "must", "ought",
      "gonna", "wanna", "gotta",
      // contractions
      "i'm", "you're", "he's", "she's", "it's", "we're", "they're", "i've",
      "you've", "we've", "they've", "i'd", "you'd", "he'd", "she'd", "we'd",
      "they'd", "i'll", "you'll", "he'll", "she'll", "we'll", "they'll",
      "isn't", "aren't", "wasn't", "weren't", "hasn't", "haven't", "hadn't",
      "doesn't", "don't", "didn't", "won't", "wouldn't", "shan't",
      "shouldn't", "can't", "cannot", "couldn't", "mustn't", "let's",
      "that's", "who's", "what's", "here's", "there's", "where's", "ain't",
      "dont", "cant", "wont", "im", "ive", "isnt", "doesnt", "didnt",
      // common adverbs and particles
      "not", "very", "too", "also", "just", "only", "even", "ever", "never",
      "always", "often", "sometimes", "again", "already", "still", "here",
      "there", "now", "soon", "almost", "quite", "rather", "really", "else",
      "perhaps", "maybe", "instead", "anyway", "however", "therefore", "thus",
      "hence", "indeed", "away", "together", "yes", "yeah", "ok", "okay",
      "oh", "hey", "lol", "lmao", "omg", "please", "well", "etc",
      // number words
      "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
      "hundred", "thousand", "million", "billion", "first", "second",
  };
  return *words;
}

// Adjectives that end in -ly.
const std::unordered_set<std::string> &LyAdjectives() {
  static const auto *words = new std::unordered_set<std::string>{
      "ugly", "lonely", "friendly", "lovely", "silly", "holy", "early",
      "daily", "likely", "unlikely", "curly", "smelly", "elderly",
      "deadly", "costly", "lively", "manly", "womanly", "cowardly", "sickly",
      "unruly", "homely", "jolly", "bubbly", "surly", "weekly", "monthly",
      "yearly", "hourly", "orderly", "worldly", "unfriendly", "family",
      "belly", "bully", "rally", "jelly", "ally", "fly", "reply", "supply",
      "italy", "july", "lily"};
  return *words;
}

PartOfSpeech ParseTag(const std::string &tag, const std::string &where) {
  if (tag == "NOUN") return PartOfSpeech::kNoun;
  if (tag == "VERB") return PartOfSpeech::kVerb;
  if (tag == "ADJ") return PartOfSpeech::kAdjective;
  if (tag == "ADV") return PartOfSpeech::kAdverb;
  if (tag == "FUNC") return PartOfSpeech::kFunction;
  if (tag == "OTHER") return PartOfSpeech::kOther;
  throw LoadError(where + ": unknown tag '" + tag + "'");
}

bool IsWordChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c == '-';
}

}  // namespace

Lemmatizer::Lemmatizer(std::unordered_set<std::string> known) : known_(std::move(known)) {}

std::vector<std::string> Lemmatizer::Candidates(std::string_view word_view) const {
  const std::string word(word_view);
  std::vector<std::string> out;
  auto add = [&](const std::string &c) {
    if (!c.empty() && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  auto irr = Irregulars().find(word);
  if (irr != Irregulars().end()) {
    add(irr->second);
    add(word);
    return out;
  }
  const size_t n = word.size();
  if (Uninflected().count(word) || n <= 3) {
    add(word);
    return out;
  }
  if (EndsWith(word, "ies") && n > 4) {
    add(word.substr(0, n - 3) + "y");
    add(word.substr(0, n - 1));
  } else if (EndsWith(word, "sses") || EndsWith(word, "shes") ||
             EndsWith(word, "ches") || EndsWith(word, "xes") ||
             EndsWith(word, "zzes")) {
    add(word.substr(0, n - 2));
    add(word.substr(0, n - 1));
  } else if (EndsWith(word, "ss") || EndsWith(word, "us") || EndsWith(word, "is") ||
             EndsWith(word, "'s")) {
    // not a plural
  } else if (word.back() == 's') {
    add(word.substr(0, n - 1));
  } else if (EndsWith(word, "ing") && n > 5) {
    const std::string stem = word.substr(0, n - 3);
    if (HasVowel(stem)) {
      for (const auto &c : UndoVerbSuffix(stem)) add(c);
    }
  } else if (EndsWith(word, "ied") && n > 4) {
    add(word.substr(0, n - 3) + "y");
  } else if (EndsWith(word, "ed") && !EndsWith(word, "eed") && n > 4) {
    const std::string stem = word.substr(0, n - 2);
    if (HasVowel(stem)) {
      for (const auto &c : UndoVerbSuffix(stem)) add(c);
    }
  }
  add(word);
  return out;
}

std::string Lemmatizer::Lemma(std::string_view word) const {
  std::vector<std::string> candidates = Candidates(word);
  if (!known_.empty()) {
    for (const auto &c : candidates) {
      if (known_.count(c)) return c;
    }
  }
  return candidates.front();
}

ContentWordTagger::ContentWordTagger(std::unordered_map<std::string, PartOfSpeech> lexicon)
    : lexicon_(std::move(lexicon)) {}

ContentWordTagger ContentWordTagger::LoadLexicon(const std::filesystem::path &path) {
  std::istringstream in(ReadFile(path));
  std::unordered_map<std::string, PartOfSpeech> lexicon;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = Split(line, '\t');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 2) throw LoadError(where + ": expected word<TAB>TAG");
    lexicon[ToLowerAscii(Trim(fields[0]))] = ParseTag(Trim(fields[1]), where);
  }
  return ContentWordTagger(std::move(lexicon));
}

PartOfSpeech ContentWordTagger::Tag(std::string_view word_view) const {
  const std::string word(word_view);
  auto it = lexicon_.find(word);
  if (it != lexicon_.end()) return it->second;
  if (FunctionWords().count(word)) return PartOfSpeech::kFunction;
  if (word.size() < 2) return PartOfSpeech::kOther;
  bool has_letter = false;
  for (char c : word) {
    if (c >= 'a' && c <= 'z') has_letter = true;
  }
  if (!has_letter) return PartOfSpeech::kOther;
  if (word.find('\'') != std::string::npos) return PartOfSpeech::kFunction;
  if (EndsWith(word, "ly") && word.size() > 4 && !LyAdjectives().count(word)) {
    return PartOfSpeech::kAdverb;
  }
  // Open-class words are not told apart further; all three classes pass.
  return PartOfSpeech::kNoun;
}

bool ContentWordTagger::IsContentWord(std::string_view word) const {
  const PartOfSpeech tag = Tag(word);
  return tag == PartOfSpeech::kNoun || tag == PartOfSpeech::kVerb ||
         tag == PartOfSpeech::kAdjective;
}

std::vector<std::string> WordTokens(std::string_view post) {
  std::vector<std::string> out;
  for (const std::string &raw : SplitWhitespace(ToLowerAscii(post))) {
    if (raw.size() >= 2 && raw.front() == '<' && raw.back() == '>') continue;
    std::string current;
    auto flush = [&]() {
      // Trim edge apostrophes and hyphens, then drop possessives.
      size_t b = 0, e = current.size();
      while (b < e && (current[b] == '\'' || current[b] == '-')) ++b;
      while (e > b && (current[e - 1] == '\'' || current[e - 1] == '-')) --e;
      std::string tok = current.substr(b, e - b);
      if (EndsWith(tok, "'s") && tok.size() > 2) tok.resize(tok.size() - 2);
      if (!tok.empty()) out.push_back(tok);
      current.clear();
    };
    for (char c : raw) {
      if (IsWordChar(c)) {
        current.push_back(c);
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

std::vector<std::string> QueryExtractor::Extract(std::string_view post) const {
  std::set<std::string> lemmas;
  for (const std::string &tok : WordTokens(post)) {
    if (!tagger_.IsContentWord(tok)) continue;
    std::string lemma = lemmatizer_.Lemma(tok);
    // Suffix stripping can land on a function word.
    if (lemma.size() < 2 || FunctionWords().count(lemma)) continue;
    lemmas.insert(std::move(lemma));
  }
  return {lemmas.begin(), lemmas.end()};
}

IdfTable::IdfTable(size_t documents, std::map<std::string, size_t> document_frequency)
    : documents_(documents), df_(std::move(document_frequency)) {}

double IdfTable::Idf(const std::string &token) const {
  if (documents_ == 0) throw PreconditionError("idf table is empty");
  const double df = static_cast<double>(std::max<size_t>(DocumentFrequency(token), 1));
  return std::log(static_cast<double>(documents_) / df);
}

size_t IdfTable::DocumentFrequency(const std::string &token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

void IdfTable::Save(const std::filesystem::path &path) const {
  Json j;
  j["documents"] = documents_;
  j["document_frequency"] = df_;
  WriteJsonAtomic(path, j);
}

IdfTable IdfTable::Load(const std::filesystem::path &path) {
  Json j = ReadJson(path);
  try {
    return IdfTable(j.at("documents").get<size_t>(),
                    j.at("document_frequency").get<std::map<std::string, size_t>>());
  } catch (const Json::exception &e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

IdfTable ComputeIdf(const std::vector<std::string> &posts,
                    const QueryExtractor &extractor) {
  if (posts.empty()) throw PreconditionError("idf needs a non-empty corpus");
  std::map<std::string, size_t> df;
  for (const std::string &post : posts) {
    for (const std::string &tok : extractor.Extract(post)) ++df[tok];
  }
  return IdfTable(posts.size(), std::move(df));
}

QueryTokens MakeQuery(std::string_view post, const QueryExtractor &extractor,
                      const IdfTable &idf) {
  QueryTokens q;
  q.tokens = extractor.Extract(post);
  for (const auto &tok : q.tokens) q.idf[tok] = idf.Idf(tok);
  return q;
}

}  // namespace toxexplain::kg_retrieval
