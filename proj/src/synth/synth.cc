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

#include "toxexplain/synth/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "toxexplain/common/io.h"
#include "toxexplain/common/text.h"

namespace toxexplain::synth {
namespace {

using Rng = std::mt19937_64;

template <typename T>
const T &Pick(const std::vector<T> &items, Rng &rng) {
  std::uniform_int_distribution<size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

bool Chance(double p, Rng &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// ---- toxicity corpus -------------------------------------------------------

const std::vector<std::string> kSubjects = {
    "i", "we", "my friend", "the teacher", "our neighbor", "my sister",
    "the old man", "everyone"};
const std::vector<std::string> kVerbs = {
    "fixed", "painted", "cooked", "visited", "cleaned", "enjoyed", "watched",
    "planted", "borrowed", "found"};
const std::vector<std::string> kNouns = {
    "garden", "kitchen", "bicycle", "movie", "library", "park", "soup",
    "fence", "concert", "bakery", "river", "museum"};
const std::vector<std::string> kTimes = {
    "today", "yesterday", "this morning", "last week", "on sunday",
    "after lunch"};
const std::vector<std::string> kInsults = {
    "idiot", "moron", "clown", "loser", "fool", "imbecile"};
const std::vector<std::string> kObscene = {"frak", "smeg", "frell", "gorram",
                                           "drokk"};
const std::vector<std::string> kThreats = {
    "i will hurt you", "watch your back", "you will pay for this",
    "i know where you live"};
const std::vector<std::string> kSlurs = {"zorblings", "varnoks", "skeevs",
                                         "grubniks"};
const std::vector<std::string> kSlurFrames = {
    "all {} are vermin", "{} should disappear", "no {} allowed",
    "typical filthy {}"};

std::string Fill(const std::string &frame, const std::string &value) {
  std::string out = frame;
  size_t at = out.find("{}");
  if (at != std::string::npos) out.replace(at, 2, value);
  return out;
}

double Saturate(double rate, double count) {
  return 1.0 - std::exp(-rate * count);
}

// ---- explanation corpus ----------------------------------------------------

const std::vector<std::string> kGroups = {
    "glorbians", "varnites", "mudlanders", "skyfolk",  "quillites",
    "bramblers", "ostrovans", "fennites",  "dravish", "zembians"};

struct Stereotype {
  std::vector<std::string> references;
  std::vector<std::string> cues;
  corpus::ImplicitClass implicit_class;
};

const std::vector<Stereotype> &Stereotypes() {
  using corpus::ImplicitClass;
  static const std::vector<Stereotype> s = {
      {{"are lazy", "do not want to work", "live off welfare"},
       {"sleeping at noon again", "never seen one holding a job",
        "collecting checks while we work"},
       ImplicitClass::kInferiority},
      {{"are greedy", "only care about money", "cheat people out of money"},
       {"counting coins at the market", "somehow own every bank",
        "always haggling over pennies"},
       ImplicitClass::kStereotypical},
      {{"are violent", "are dangerous criminals", "attack people"},
       {"lock your doors tonight", "another stabbing downtown",
        "carry knives everywhere"},
       ImplicitClass::kThreatening},
      {{"are dirty", "do not wash", "live in filth"},
       {"the smell on the bus", "their streets are full of trash",
        "soap must be a foreign concept"},
       ImplicitClass::kInferiority},
      {{"are stupid", "are less intelligent", "cannot think for themselves"},
       {"failed the test again", "cannot even count to ten",
        "needs instructions for a door"},
       ImplicitClass::kInferiority},
      {{"do not belong here", "should go back home", "are invaders"},
       {"go back where you came from", "this country is full",
        "our town used to be ours"},
       ImplicitClass::kIncitement},
      {{"cannot be trusted", "are liars", "are deceptive"},
       {"count your change twice", "never believe their promises",
        "watch your wallet around them"},
       ImplicitClass::kStereotypical},
      {{"take jobs from us", "get unfair advantages", "are favored over us"},
       {"got the job we deserved", "special treatment again",
        "we pay while they take"},
       ImplicitClass::kGrievance},
      {{"are inferior", "are worthless", "contribute nothing"},
       {"oh sure they are real geniuses", "such a great gift to society",
        "what a lovely bunch of neighbors"},
       ImplicitClass::kIrony},
  };
  return s;
}

const std::vector<std::string> kPostFrames = {
    "{cue} , typical {group}",         "{group} again : {cue}",
    "just {group} things . {cue}",     "ask any {group} about it . {cue}",
    "{cue} . thanks {group}",          "you know how {group} are . {cue}",
};

std::string RenderPost(const std::string &frame, const std::string &group,
                       const std::string &cue, Rng &rng) {
  std::string out = frame;
  out.replace(out.find("{cue}"), 5, cue);
  out.replace(out.find("{group}"), 7, group);
  // Raw-looking noise for the preprocessor to clean up.
  if (Chance(0.15, rng)) out[0] = static_cast<char>(std::toupper(out[0]));
  if (Chance(0.08, rng)) out = "@user" + std::to_string(rng() % 1000) + " " + out;
  if (Chance(0.08, rng)) out += " http://t.co/" + ToHex(rng()).substr(0, 6);
  if (Chance(0.05, rng)) out = "&gt; " + out;
  return out;
}

std::string Flag(double p, Rng &rng) { return Chance(p, rng) ? "1" : "0"; }

std::string LhClassName(corpus::ImplicitClass cls) {
  switch (cls) {
    case corpus::ImplicitClass::kGrievance: return "white_grievance";
    default: return corpus::ImplicitClassName(cls);
  }
}

// ---- knowledge graphs ------------------------------------------------------

struct RelationSpec {
  const char *name;
  double weight_scale;
};

const std::vector<RelationSpec> kRelations = {
    {"RelatedTo", 1.0}, {"IsA", 2.0},      {"HasProperty", 1.5},
    {"CapableOf", 1.0}, {"AtLocation", 1.0}, {"UsedFor", 1.0},
    {"Desires", 1.0},   {"PartOf", 1.0},   {"Synonym", 2.0},
    {"Antonym", 1.0}};

std::vector<std::string> KgConcepts() {
  std::set<std::string> concepts(kGroups.begin(), kGroups.end());
  auto add_words = [&](const std::string &phrase) {
    for (const std::string &w : SplitWhitespace(phrase)) {
      if (w.size() > 3) concepts.insert(w);
    }
  };
  for (const Stereotype &s : Stereotypes()) {
    for (const auto &r : s.references) add_words(r);
    for (const auto &c : s.cues) add_words(c);
  }
  for (const auto &n : kNouns) concepts.insert(n);
  for (const char *extra : {"person", "people", "money", "crime", "country",
                            "work", "job", "town", "group", "community"}) {
    concepts.insert(extra);
  }
  return {concepts.begin(), concepts.end()};
}

}  // namespace

std::vector<corpus::ToxicityRecord> MakeToxicityRecords(
    const ToxicityCorpusOptions &options) {
  Rng rng(options.seed);
  std::normal_distribution<double> noise(0.0, options.label_noise);
  std::vector<corpus::ToxicityRecord> out;
  out.reserve(options.records);
  for (size_t i = 0; i < options.records; ++i) {
    std::vector<std::string> parts = {Pick(kSubjects, rng) + " " +
                                      Pick(kVerbs, rng) + " the " +
                                      Pick(kNouns, rng) + " " + Pick(kTimes, rng)};
    double n_ins = 0, n_obs = 0, n_thr = 0, n_id = 0;
    if (Chance(options.toxic_fraction, rng)) {
      int items = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < items; ++k) {
        switch (rng() % 4) {
          case 0: parts.push_back("you " + Pick(kInsults, rng)); ++n_ins; break;
          case 1: parts.push_back(Pick(kObscene, rng)); ++n_obs; break;
          case 2: parts.push_back(Pick(kThreats, rng)); ++n_thr; break;
          default:
            parts.push_back(Fill(Pick(kSlurFrames, rng), Pick(kSlurs, rng)));
            ++n_id;
        }
      }
      std::shuffle(parts.begin(), parts.end(), rng);
    }
    const double total = n_ins + n_obs + n_thr + n_id;
    std::array<double, 6> labels = {
        Saturate(1.2, total),
        total >= 3 ? 0.6 : (total == 2 ? 0.25 : 0.02 * total),
        Saturate(1.5, n_obs),
        Saturate(1.5, n_thr),
        Saturate(1.2, n_ins + 0.3 * n_id),
        Saturate(1.5, n_id)};
    for (double &v : labels) v = std::clamp(v + noise(rng), 0.0, 1.0);
    corpus::ToxicityRecord rec;
    rec.id = "t" + std::to_string(i);
    rec.text = Join(parts, " , ");
    rec.labels = labels;
    out.push_back(std::move(rec));
  }
  return out;
}

std::string ToxicityCsv(const std::vector<corpus::ToxicityRecord> &records) {
  std::ostringstream out;
  out << "id,text,toxicity,severe_toxicity,obscene,threat,insult,identity_attack\n";
  for (const auto &r : records) {
    std::vector<std::string> row = {r.id, r.text};
    for (double v : r.labels) {
      std::ostringstream num;
      num.precision(6);
      num << v;
      row.push_back(num.str());
    }
    out << FormatDelimitedRow(row) << '\n';
  }
  return out.str();
}

const std::vector<std::string> &BenignFixtures() {
  static const std::vector<std::string> f = {
      "we cooked the soup this morning",
      "my sister visited the museum on sunday",
      "the teacher planted the garden after lunch",
      "everyone enjoyed the concert yesterday",
      "i fixed the bicycle today",
      "our neighbor painted the fence last week",
      "the old man found the library",
      "my friend watched the movie after lunch",
      "we cleaned the kitchen today",
      "i borrowed the bicycle on sunday"};
  return f;
}

const std::vector<std::string> &SlurFixtures() {
  static const std::vector<std::string> f = {
      "all zorblings are vermin",
      "skeevs should disappear , you idiot",
      "no varnoks allowed , frak",
      "typical filthy grubniks",
      "all skeevs are vermin , watch your back",
      "grubniks should disappear",
      "no zorblings allowed , you moron",
      "typical filthy varnoks , i will hurt you",
      "all grubniks are vermin , smeg",
      "zorblings should disappear , you clown"};
  return f;
}

std::string MakeExplanationTable(const ExplanationCorpusOptions &options) {
  Rng rng(options.seed);
  const bool sbic = options.source == corpus::SourceDataset::kSbicLike;
  std::ostringstream out;
  if (sbic) {
    out << "post_id,post,target_group,explanation,split,intentional,lewd,"
           "offensive,group_targeting,in_group\n";
  }
  std::set<std::string> seen_posts;
  size_t serial = 0;
  auto emit_split = [&](const std::string &split, size_t count) {
    for (size_t i = 0; i < count;) {
      const std::string &group = Pick(kGroups, rng);
      const Stereotype &st = Pick(Stereotypes(), rng);
      std::string post =
          RenderPost(Pick(kPostFrames, rng), group, Pick(st.cues, rng), rng);
      // Keep post texts unique so splits stay disjoint by content.
      if (!seen_posts.insert(ToLowerAscii(post)).second) continue;
      ++i;
      std::string id = (sbic ? "s" : "h") + std::to_string(serial++);
      if (sbic) {
        int annotations =
            1 + static_cast<int>(rng() % std::max(1, options.max_references));
        for (int a = 0; a < annotations; ++a) {
          std::string explanation =
              Chance(options.empty_explanation_rate, rng)
                  ? ""
                  : group + " " + Pick(st.references, rng);
          std::string target = Chance(0.05, rng) ? "" : group;
          out << FormatDelimitedRow(
                     {id, post, target, explanation, split, Flag(0.7, rng),
                      Flag(0.05, rng), Flag(0.85, rng), Flag(0.9, rng),
                      Flag(0.05, rng)})
              << '\n';
        }
      } else {
        Json row = {{"post_id", id},
                    {"post", post},
                    {"target_group", group},
                    {"explanation", group + " " + st.references.front()},
                    {"split", split},
                    {"implicit_class", LhClassName(st.implicit_class)}};
        out << row.dump() << '\n';
      }
    }
  };
  emit_split("train", options.train_posts);
  emit_split("test", options.test_posts);
  emit_split("validation", options.validation_posts);
  return out.str();
}

std::string MakeConceptNetStyleTsv(const KnowledgeGraphOptions &options) {
  Rng rng(options.seed);
  const std::vector<std::string> concepts = KgConcepts();
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::ostringstream out;
  out << "head\trelation\ttail\tweight\n";
  std::uniform_real_distribution<double> spread(0.5, 8.0);
  size_t attempts = 0;
  while (seen.size() < options.tuples && attempts++ < options.tuples * 50) {
    const RelationSpec &rel = Pick(kRelations, rng);
    std::string head = Pick(concepts, rng);
    std::string tail = Pick(concepts, rng);
    if (head == tail) continue;
    if (!seen.emplace(head, rel.name, tail).second) continue;
    double weight;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < 0.6) {
      weight = 1.0;
    } else if (u < 0.8) {
      weight = 2.0;
    } else {
      weight = std::round(spread(rng) * 1000.0) / 1000.0;
    }
    weight *= rel.weight_scale;
    std::ostringstream w;
    w << weight;
    out << head << '\t' << rel.name << '\t' << tail << '\t' << w.str() << '\n';
  }
  return out.str();
}

std::vector<std::string> MakeStereoTuples(const KnowledgeGraphOptions &options) {
  Rng rng(options.seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  std::vector<std::string> generic = {"people", "immigrants", "neighbors",
                                      "strangers", "workers"};
  size_t attempts = 0;
  while (out.size() < options.tuples && attempts++ < options.tuples * 50) {
    const Stereotype &st = Pick(Stereotypes(), rng);
    std::string subject =
        Chance(0.8, rng) ? Pick(kGroups, rng) : Pick(generic, rng);
    std::string tuple = subject + " " + Pick(st.references, rng);
    if (seen.insert(tuple).second) out.push_back(tuple);
  }
  return out;
}

std::vector<std::filesystem::path> WriteDemoData(const std::filesystem::path &dir,
                                                 const DemoDataOptions &options) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string &name, const std::string &content) {
    std::filesystem::path p = dir / name;
    WriteFileAtomic(p, content);
    written.push_back(p);
  };
  ExplanationCorpusOptions sbic;
  sbic.train_posts = options.explanation_train;
  sbic.test_posts = options.explanation_test;
  sbic.seed = options.seed;
  put("sbic_like.csv", MakeExplanationTable(sbic));
  ExplanationCorpusOptions lh = sbic;
  lh.source = corpus::SourceDataset::kLatentHatredLike;
  lh.seed = MixSeed(options.seed, 2);
  put("latent_hatred_like.jsonl", MakeExplanationTable(lh));
  ToxicityCorpusOptions tox;
  tox.records = options.toxicity_records;
  tox.seed = MixSeed(options.seed, 3);
  put("toxicity.csv", ToxicityCsv(MakeToxicityRecords(tox)));
  KnowledgeGraphOptions kg;
  kg.tuples = options.kg_tuples;
  kg.seed = MixSeed(options.seed, 4);
  put("conceptnet_like.tsv", MakeConceptNetStyleTsv(kg));
  std::vector<std::string> stereo = MakeStereoTuples(kg);
  put("stereokg_like.txt", Join(stereo, "\n") + "\n");
  return written;
}

}  // namespace toxexplain::synth
