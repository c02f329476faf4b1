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

#include "toxexplain/corpus/dataset.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain::corpus {

namespace {

// A raw table row addressed by column name.
struct RawRow {
  size_t line = 0;
  std::unordered_map<std::string, std::string> fields;
};

struct RawTable {
  std::set<std::string> columns;
  std::vector<RawRow> rows;
};

std::string JsonFieldToString(const Json &value) {
  if (value.is_null()) return "";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return value.dump();
}

RawTable ReadRawTable(const std::string &content, TableFormat format,
                      const std::string &origin) {
  RawTable table;
  if (Trim(content).empty()) {
    throw LoadError(origin + ": file is empty");
  }
  if (format == TableFormat::kJsonLines) {
    std::istringstream in(content);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (Trim(line).empty()) continue;
      Json obj;
      try {
        obj = Json::parse(line);
      } catch (const Json::exception &e) {
        throw LoadError(origin + ":" + std::to_string(lineno) +
                        ": malformed JSON: " + e.what());
      }
      if (!obj.is_object()) {
        throw LoadError(origin + ":" + std::to_string(lineno) +
                        ": expected a JSON object");
      }
      RawRow row;
      row.line = lineno;
      for (auto it = obj.begin(); it != obj.end(); ++it) {
        table.columns.insert(it.key());
        row.fields[it.key()] = JsonFieldToString(it.value());
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  char delim = format == TableFormat::kTsv ? '\t' : ',';
  DelimitedTable parsed = ParseDelimited(content, delim);
  for (const std::string &h : parsed.header) table.columns.insert(h);
  for (size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto &cells = parsed.rows[r];
    if (cells.size() != parsed.header.size()) {
      throw LoadError(origin + ":" + std::to_string(parsed.lines[r]) +
                      ": expected " + std::to_string(parsed.header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    }
    RawRow row;
    row.line = parsed.lines[r];
    for (size_t c = 0; c < cells.size(); ++c) {
      row.fields[parsed.header[c]] = cells[c];
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void RequireColumn(const RawTable &table, const std::string &column,
                   const std::string &origin) {
  if (table.columns.count(column) == 0) {
    throw LoadError(origin + ": missing required column '" + column + "'");
  }
}

const std::string &Field(const RawRow &row, const std::string &column) {
  static const std::string kEmpty;
  auto it = row.fields.find(column);
  return it == row.fields.end() ? kEmpty : it->second;
}

// Parses an annotation flag. SBIC stores fractional agreement (0, 0.5, 1).
double ParseFlagValue(const std::string &raw, const std::string &column,
                      size_t line, const std::string &origin) {
  std::string v = ToLowerAscii(Trim(raw));
  if (v.empty() || v == "false" || v == "no" || v == "n") return 0.0;
  if (v == "true" || v == "yes" || v == "y") return 1.0;
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size() && d >= 0.0 && d <= 1.0) return d;
  } catch (const std::exception &) {
  }
  throw LoadError(origin + ":" + std::to_string(line) + ": column '" + column +
                  "' has non-flag value '" + raw + "'");
}

TableFormat ParseFormat(const std::string &name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "tsv") return TableFormat::kTsv;
  if (name == "jsonl" || name == "json-lines") return TableFormat::kJsonLines;
  throw PreconditionError("unknown table format '" + name + "'");
}

std::string FormatName(TableFormat format) {
  switch (format) {
    case TableFormat::kCsv: return "csv";
    case TableFormat::kTsv: return "tsv";
    case TableFormat::kJsonLines: return "jsonl";
  }
  return "csv";
}

// Per-post accumulator while reading annotation rows.
struct PostAccumulator {
  ExplanationRecord record;
  SplitName split = SplitName::kTrain;
  size_t first_line = 0;
  std::array<double, 5> flag_sum{};
  size_t flag_rows = 0;
  std::vector<std::string> targets;  // in row order, non-empty only
};

std::string MajorityTarget(const std::vector<std::string> &targets) {
  std::map<std::string, size_t> counts;
  for (const auto &t : targets) ++counts[t];
  std::string best;
  size_t best_count = 0;
  for (const auto &t : targets) {
    if (counts[t] > best_count) {
      best = t;
      best_count = counts[t];
    }
  }
  return best;
}

}  // namespace

std::string SourceDatasetName(SourceDataset source) {
  return source == SourceDataset::kSbicLike ? "sbic" : "latent_hatred";
}

SourceDataset ParseSourceDataset(const std::string &name) {
  std::string n = ToLowerAscii(name);
  if (n == "sbic" || n == "sbic-like" || n == "sbic_like") {
    return SourceDataset::kSbicLike;
  }
  if (n == "latent_hatred" || n == "latenthatred" || n == "latent-hatred" ||
      n == "latent_hatred_like" || n == "latenthatred-like") {
    return SourceDataset::kLatentHatredLike;
  }
  throw PreconditionError("unknown dataset schema '" + name + "'");
}

std::string ImplicitClassName(ImplicitClass cls) {
  switch (cls) {
    case ImplicitClass::kGrievance: return "grievance";
    case ImplicitClass::kIncitement: return "incitement";
    case ImplicitClass::kInferiority: return "inferiority";
    case ImplicitClass::kIrony: return "irony";
    case ImplicitClass::kStereotypical: return "stereotypical";
    case ImplicitClass::kThreatening: return "threatening";
    case ImplicitClass::kOther: return "other";
  }
  return "other";
}

std::optional<ImplicitClass> ParseImplicitClass(const std::string &name) {
  std::string n = ToLowerAscii(Trim(name));
  for (ImplicitClass cls :
       {ImplicitClass::kGrievance, ImplicitClass::kIncitement,
        ImplicitClass::kInferiority, ImplicitClass::kIrony,
        ImplicitClass::kStereotypical, ImplicitClass::kThreatening,
        ImplicitClass::kOther}) {
    if (n == ImplicitClassName(cls)) return cls;
  }
  // LatentHatred's release spells two classes differently.
  if (n == "white_grievance" || n == "white grievance") {
    return ImplicitClass::kGrievance;
  }
  if (n == "threatening_speech") return ImplicitClass::kThreatening;
  return std::nullopt;
}

std::string SplitNameString(SplitName name) {
  switch (name) {
    case SplitName::kTrain: return "train";
    case SplitName::kTest: return "test";
    case SplitName::kValidation: return "validation";
  }
  return "train";
}

std::optional<SplitName> ParseSplitName(const std::string &name) {
  std::string n = ToLowerAscii(Trim(name));
  if (n == "train" || n == "trn") return SplitName::kTrain;
  if (n == "test" || n == "tst") return SplitName::kTest;
  if (n == "validation" || n == "dev" || n == "val" || n == "valid") {
    return SplitName::kValidation;
  }
  return std::nullopt;
}

GroupedReferences GroupReferences(const std::vector<ReferenceRow> &rows) {
  GroupedReferences out;
  std::unordered_map<std::string, size_t> index;
  std::vector<std::set<std::string>> seen;
  for (const ReferenceRow &row : rows) {
    auto [it, inserted] = index.emplace(row.post_id, out.sets.size());
    if (inserted) {
      out.sets.push_back(ReferenceSet{row.post_id, {}});
      seen.emplace_back();
    }
    std::string explanation = Trim(row.explanation);
    if (explanation.empty()) continue;
    if (seen[it->second].insert(explanation).second) {
      out.sets[it->second].references.push_back(explanation);
    }
  }
  for (const ReferenceSet &set : out.sets) {
    if (set.references.empty()) out.empty_reference_ids.push_back(set.post_id);
  }
  return out;
}

ExplanationSchema ExplanationSchema::Default(SourceDataset source) {
  ExplanationSchema schema;
  schema.source = source;
  return schema;
}

ExplanationSchema ExplanationSchema::FromJson(const Json &json) {
  ExplanationSchema schema;
  if (json.contains("source")) {
    schema.source = ParseSourceDataset(json.at("source").get<std::string>());
  }
  if (json.contains("format")) {
    schema.format = ParseFormat(json.at("format").get<std::string>());
  }
  auto read = [&](const char *key, std::string &field) {
    if (json.contains(key)) field = json.at(key).get<std::string>();
  };
  read("post_id", schema.post_id);
  read("post", schema.post);
  read("target_group", schema.target_group);
  read("explanation", schema.explanation);
  read("split", schema.split);
  read("implicit_class", schema.implicit_class);
  if (json.contains("flags")) {
    const Json &flags = json.at("flags");
    if (!flags.is_array() || flags.size() != 5) {
      throw PreconditionError("schema 'flags' must list 5 column names");
    }
    for (size_t i = 0; i < 5; ++i) schema.flags[i] = flags[i].get<std::string>();
  }
  return schema;
}

Json ExplanationSchema::ToJson() const {
  return Json{{"source", SourceDatasetName(source)},
              {"format", FormatName(format)},
              {"post_id", post_id},
              {"post", post},
              {"target_group", target_group},
              {"explanation", explanation},
              {"split", split},
              {"flags", flags},
              {"implicit_class", implicit_class}};
}

LengthStats ComputeLengthStats(const std::vector<std::string> &texts) {
  LengthStats stats;
  stats.count = texts.size();
  if (texts.empty()) return stats;
  std::vector<double> lengths;
  lengths.reserve(texts.size());
  double sum = 0.0;
  for (const auto &t : texts) {
    lengths.push_back(static_cast<double>(SplitWhitespace(t).size()));
    sum += lengths.back();
  }
  stats.mean = sum / static_cast<double>(lengths.size());
  double ss = 0.0;
  for (double l : lengths) ss += (l - stats.mean) * (l - stats.mean);
  stats.std = std::sqrt(ss / static_cast<double>(lengths.size()));
  return stats;
}

namespace {

Json LengthStatsJson(const LengthStats &s) {
  return Json{{"count", s.count}, {"mean", s.mean}, {"std", s.std}};
}

}  // namespace

Json SplitManifest::ToJson() const {
  return Json{{"split", SplitNameString(name)},
              {"rows", rows},
              {"records", records},
              {"references", references},
              {"empty_reference_posts", empty_reference_posts},
              {"dropped_rows", dropped_rows},
              {"post_length", LengthStatsJson(post_length)},
              {"implied_length", LengthStatsJson(implied_length)}};
}

Json ExplanationDataset::ManifestJson() const {
  Json splits = Json::array();
  for (const auto &m : manifest) splits.push_back(m.ToJson());
  return Json{{"dataset", SourceDatasetName(source)},
              {"tokenizer", "whitespace"},
              {"splits", splits}};
}

SplitManifest SummarizeSplit(const ExplanationSplit &split, size_t rows,
                             size_t dropped_rows) {
  SplitManifest m;
  m.name = split.name;
  m.rows = rows;
  m.dropped_rows = dropped_rows;
  m.records = split.records.size();
  std::vector<std::string> posts, implied;
  for (const auto &rec : split.records) {
    posts.push_back(rec.post.text);
    if (rec.references.references.empty()) ++m.empty_reference_posts;
    for (const auto &ref : rec.references.references) implied.push_back(ref);
  }
  m.references = implied.size();
  m.post_length = ComputeLengthStats(posts);
  m.implied_length = ComputeLengthStats(implied);
  return m;
}

ExplanationDataset ParseExplanationDataset(const std::string &content,
                                           const ExplanationSchema &schema,
                                           const PreprocessConfig &preprocess,
                                           const std::string &origin) {
  RawTable table = ReadRawTable(content, schema.format, origin);
  if (table.rows.empty()) {
    throw LoadError(origin + ": no data rows");
  }
  for (const std::string *col : {&schema.post_id, &schema.post,
                                 &schema.explanation, &schema.split,
                                 &schema.target_group}) {
    RequireColumn(table, *col, origin);
  }
  const bool sbic = schema.source == SourceDataset::kSbicLike;
  if (sbic) {
    for (const auto &flag : schema.flags) RequireColumn(table, flag, origin);
  } else {
    RequireColumn(table, schema.implicit_class, origin);
  }

  std::vector<PostAccumulator> posts;
  std::unordered_map<std::string, size_t> index;
  std::vector<ReferenceRow> ref_rows;
  std::array<size_t, 3> rows_per_split{};
  std::array<size_t, 3> dropped_per_split{};

  for (const RawRow &row : table.rows) {
    auto where = [&](const std::string &column) {
      return origin + ":" + std::to_string(row.line) + ": column '" + column +
             "'";
    };
    auto split = ParseSplitName(Field(row, schema.split));
    if (!split) {
      throw LoadError(where(schema.split) + " has unknown split '" +
                      Field(row, schema.split) + "'");
    }
    const size_t split_idx = static_cast<size_t>(*split);
    ++rows_per_split[split_idx];

    std::string id = Trim(Field(row, schema.post_id));
    if (id.empty()) throw LoadError(where(schema.post_id) + " is empty");
    std::string text = Preprocess(Field(row, schema.post), preprocess);
    if (IsDropCandidate(text)) {
      ++dropped_per_split[split_idx];
      continue;
    }

    auto [it, inserted] = index.emplace(id, posts.size());
    if (inserted) {
      PostAccumulator acc;
      acc.record.post = Post{id, text, schema.source};
      acc.split = *split;
      acc.first_line = row.line;
      posts.push_back(std::move(acc));
    }
    PostAccumulator &acc = posts[it->second];
    if (acc.split != *split) {
      throw LoadError(where(schema.split) + ": post id '" + id +
                      "' appears in both " + SplitNameString(acc.split) +
                      " and " + SplitNameString(*split));
    }
    if (acc.record.post.text != text) {
      throw LoadError(where(schema.post) + ": post id '" + id +
                      "' has conflicting text (first seen at line " +
                      std::to_string(acc.first_line) + ")");
    }

    ref_rows.push_back(
        ReferenceRow{id, Preprocess(Field(row, schema.explanation), preprocess)});

    std::string target = Preprocess(Field(row, schema.target_group), preprocess);
    if (!target.empty()) acc.targets.push_back(target);

    if (sbic) {
      for (size_t f = 0; f < 5; ++f) {
        acc.flag_sum[f] += ParseFlagValue(Field(row, schema.flags[f]),
                                          schema.flags[f], row.line, origin);
      }
      ++acc.flag_rows;
    } else {
      const std::string &raw = Field(row, schema.implicit_class);
      std::optional<ImplicitClass> cls =
          Trim(raw).empty() ? std::optional(ImplicitClass::kOther)
                            : ParseImplicitClass(raw);
      if (!cls) {
        throw LoadError(where(schema.implicit_class) +
                        " has unknown implicit class '" + raw + "'");
      }
      acc.record.attributes.implicit_class = *cls;
    }
  }

  GroupedReferences grouped = GroupReferences(ref_rows);
  for (ReferenceSet &set : grouped.sets) {
    posts[index.at(set.post_id)].record.references = std::move(set);
  }

  ExplanationDataset dataset;
  dataset.source = schema.source;
  dataset.train.name = SplitName::kTrain;
  dataset.test.name = SplitName::kTest;
  dataset.validation.name = SplitName::kValidation;
  for (PostAccumulator &acc : posts) {
    InDatasetAttributes &attrs = acc.record.attributes;
    attrs.target_group = MajorityTarget(acc.targets);
    if (sbic) {
      // Majority vote over annotators; SBIC's 0.5 ("maybe") counts as half.
      auto vote = [&](size_t f) {
        return acc.flag_sum[f] / static_cast<double>(acc.flag_rows) >= 0.5;
      };
      attrs.sbic_flags = SbicFlags{vote(0), vote(1), vote(2), vote(3), vote(4)};
    }
    switch (acc.split) {
      case SplitName::kTrain: dataset.train.records.push_back(std::move(acc.record)); break;
      case SplitName::kTest: dataset.test.records.push_back(std::move(acc.record)); break;
      case SplitName::kValidation:
        dataset.validation.records.push_back(std::move(acc.record));
        break;
    }
  }
  for (const ExplanationSplit *split :
       {&dataset.train, &dataset.test, &dataset.validation}) {
    size_t idx = static_cast<size_t>(split->name);
    if (split->name == SplitName::kValidation && rows_per_split[idx] == 0) {
      continue;
    }
    dataset.manifest.push_back(
        SummarizeSplit(*split, rows_per_split[idx], dropped_per_split[idx]));
  }
  return dataset;
}

ExplanationDataset LoadExplanationDataset(const std::filesystem::path &path,
                                          const ExplanationSchema &schema,
                                          const PreprocessConfig &preprocess) {
  return ParseExplanationDataset(ReadFile(path), schema, preprocess,
                                 path.string());
}

Json RecordToJson(const ExplanationRecord &record) {
  Json attrs{{"target_group", record.attributes.target_group}};
  if (record.attributes.sbic_flags) {
    const SbicFlags &f = *record.attributes.sbic_flags;
    attrs["flags"] = Json{{"intentional", f.intentional},
                          {"lewd", f.lewd},
                          {"offensive", f.offensive},
                          {"group_targeting", f.group_targeting},
                          {"in_group", f.in_group}};
  }
  if (record.attributes.implicit_class) {
    attrs["implicit_class"] = ImplicitClassName(*record.attributes.implicit_class);
  }
  return Json{{"post_id", record.post.id},
              {"post", record.post.text},
              {"source", SourceDatasetName(record.post.source)},
              {"references", record.references.references},
              {"attributes", attrs}};
}

ExplanationRecord RecordFromJson(const Json &json) {
  ExplanationRecord rec;
  rec.post.id = json.at("post_id").get<std::string>();
  rec.post.text = json.at("post").get<std::string>();
  rec.post.source = ParseSourceDataset(json.value("source", "sbic"));
  rec.references.post_id = rec.post.id;
  rec.references.references =
      json.at("references").get<std::vector<std::string>>();
  const Json &attrs = json.at("attributes");
  rec.attributes.target_group = attrs.value("target_group", "");
  if (attrs.contains("flags")) {
    const Json &f = attrs.at("flags");
    rec.attributes.sbic_flags =
        SbicFlags{f.value("intentional", false), f.value("lewd", false),
                  f.value("offensive", false), f.value("group_targeting", false),
                  f.value("in_group", false)};
  }
  if (attrs.contains("implicit_class")) {
    auto cls = ParseImplicitClass(attrs.at("implicit_class").get<std::string>());
    if (!cls) throw LoadError("unknown implicit class in record " + rec.post.id);
    rec.attributes.implicit_class = *cls;
  }
  return rec;
}

void WriteSplit(const std::filesystem::path &path,
                const ExplanationSplit &split) {
  std::vector<Json> rows;
  rows.reserve(split.records.size());
  for (const auto &rec : split.records) rows.push_back(RecordToJson(rec));
  WriteJsonLinesAtomic(path, rows);
}

ExplanationSplit ReadSplit(const std::filesystem::path &path, SplitName name) {
  ExplanationSplit split;
  split.name = name;
  for (const Json &row : ReadJsonLines(path)) {
    split.records.push_back(RecordFromJson(row));
  }
  return split;
}

ToxicitySchema ToxicitySchema::FromJson(const Json &json) {
  ToxicitySchema schema;
  if (json.contains("format")) {
    schema.format = ParseFormat(json.at("format").get<std::string>());
  }
  if (json.contains("id")) schema.id = json.at("id").get<std::string>();
  if (json.contains("text")) schema.text = json.at("text").get<std::string>();
  if (json.contains("labels")) {
    const Json &labels = json.at("labels");
    if (!labels.is_array() || labels.size() != 6) {
      throw PreconditionError("toxicity schema 'labels' must list 6 columns");
    }
    for (size_t i = 0; i < 6; ++i) schema.labels[i] = labels[i].get<std::string>();
  }
  return schema;
}

ToxicitySplit ParseToxicityDataset(const std::string &content,
                                   const ToxicitySchema &schema,
                                   const PreprocessConfig &preprocess,
                                   const std::string &origin) {
  RawTable table = ReadRawTable(content, schema.format, origin);
  if (table.rows.empty()) throw LoadError(origin + ": no data rows");
  RequireColumn(table, schema.text, origin);
  for (const auto &label : schema.labels) RequireColumn(table, label, origin);
  const bool has_id = table.columns.count(schema.id) > 0;

  ToxicitySplit split;
  split.name = SplitName::kTrain;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const RawRow &row = table.rows[r];
    ToxicityRecord rec;
    rec.id = has_id ? Field(row, schema.id) : std::to_string(r);
    rec.text = Preprocess(Field(row, schema.text), preprocess);
    if (IsDropCandidate(rec.text)) continue;
    for (size_t i = 0; i < 6; ++i) {
      const std::string &raw = Field(row, schema.labels[i]);
      double value = std::nan("");
      try {
        size_t used = 0;
        std::string trimmed = Trim(raw);
        value = std::stod(trimmed, &used);
        if (used != trimmed.size()) value = std::nan("");
      } catch (const std::exception &) {
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        throw LoadError(origin + ":" + std::to_string(row.line) +
                        ": column '" + schema.labels[i] +
                        "' must be a number in [0,1], got '" + raw + "'");
      }
      rec.labels[i] = value;
    }
    split.records.push_back(std::move(rec));
  }
  return split;
}

ToxicitySplit LoadToxicityDataset(const std::filesystem::path &path,
                                  const ToxicitySchema &schema,
                                  const PreprocessConfig &preprocess) {
  return ParseToxicityDataset(ReadFile(path), schema, preprocess, path.string());
}

}  // namespace toxexplain::corpus
