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

#ifndef TOXEXPLAIN_CORPUS_DATASET_H_
#define TOXEXPLAIN_CORPUS_DATASET_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "toxexplain/common/io.h"
#include "toxexplain/corpus/preprocess.h"

namespace toxexplain::corpus {

enum class SourceDataset { kSbicLike, kLatentHatredLike };

std::string SourceDatasetName(SourceDataset source);
SourceDataset ParseSourceDataset(const std::string &name);

// An implicit post (model input X).
struct Post {
  std::string id;
  std::string text;
  SourceDataset source = SourceDataset::kSbicLike;
};

// Gold implied-stereotype strings (Y) for one post. SBIC-like posts may hold
// several; LatentHatred-like posts hold one. An empty list marks a post with
// no usable gold explanation.
struct ReferenceSet {
  std::string post_id;
  std::vector<std::string> references;
};

struct SbicFlags {
  bool intentional = false;
  bool lewd = false;
  bool offensive = false;
  bool group_targeting = false;
  bool in_group = false;
};

enum class ImplicitClass {
  kGrievance,
  kIncitement,
  kInferiority,
  kIrony,
  kStereotypical,
  kThreatening,
  kOther,
};

std::string ImplicitClassName(ImplicitClass cls);
std::optional<ImplicitClass> ParseImplicitClass(const std::string &name);

// Auxiliary annotations shipped with the explanation datasets. Exactly one
// of sbic_flags / implicit_class is set, matching the source dataset.
struct InDatasetAttributes {
  std::string target_group;
  std::optional<SbicFlags> sbic_flags;
  std::optional<ImplicitClass> implicit_class;
};

struct ExplanationRecord {
  Post post;
  ReferenceSet references;
  InDatasetAttributes attributes;
};

// Jigsaw-style regression target, label order fixed by kToxicityLabelCount
// in the tox module: toxicity, severe toxicity, obscene, threat, insult,
// identity attack.
struct ToxicityRecord {
  std::string id;
  std::string text;
  std::array<double, 6> labels{};
};

enum class SplitName { kTrain, kTest, kValidation };

std::string SplitNameString(SplitName name);
std::optional<SplitName> ParseSplitName(const std::string &name);

template <typename Record>
struct DatasetSplit {
  SplitName name = SplitName::kTrain;
  std::vector<Record> records;
};

using ExplanationSplit = DatasetSplit<ExplanationRecord>;
using ToxicitySplit = DatasetSplit<ToxicityRecord>;

// (post_id, explanation) pair as it appears in a raw annotation row.
struct ReferenceRow {
  std::string post_id;
  std::string explanation;
};

struct GroupedReferences {
  // One set per post id, in order of first appearance.
  std::vector<ReferenceSet> sets;
  // Post ids whose explanations were all empty.
  std::vector<std::string> empty_reference_ids;
};

// Groups rows by post id. Empty explanations are skipped; duplicate strings
// within a post are kept once, first occurrence wins.
GroupedReferences GroupReferences(const std::vector<ReferenceRow> &rows);

enum class TableFormat { kCsv, kTsv, kJsonLines };

// Column mapping for an explanation dataset file. Flag columns only apply to
// SBIC-like data, implicit_class only to LatentHatred-like data.
struct ExplanationSchema {
  SourceDataset source = SourceDataset::kSbicLike;
  TableFormat format = TableFormat::kCsv;
  std::string post_id = "post_id";
  std::string post = "post";
  std::string target_group = "target_group";
  std::string explanation = "explanation";
  std::string split = "split";
  std::array<std::string, 5> flags = {"intentional", "lewd", "offensive",
                                      "group_targeting", "in_group"};
  std::string implicit_class = "implicit_class";

  static ExplanationSchema Default(SourceDataset source);
  static ExplanationSchema FromJson(const Json &json);
  Json ToJson() const;
};

// Length statistics over whitespace tokens.
struct LengthStats {
  size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

LengthStats ComputeLengthStats(const std::vector<std::string> &texts);

struct SplitManifest {
  SplitName name = SplitName::kTrain;
  size_t rows = 0;            // annotation rows read for this split
  size_t records = 0;         // distinct posts
  size_t references = 0;      // non-empty gold explanations kept
  size_t empty_reference_posts = 0;
  size_t dropped_rows = 0;    // rows whose post was empty after preprocessing
  LengthStats post_length;
  LengthStats implied_length;

  Json ToJson() const;
};

struct ExplanationDataset {
  SourceDataset source = SourceDataset::kSbicLike;
  ExplanationSplit train;
  ExplanationSplit test;
  ExplanationSplit validation;
  std::vector<SplitManifest> manifest;

  Json ManifestJson() const;
};

// Builds the manifest entry for a split from its records alone (row and drop
// counts are left as given).
SplitManifest SummarizeSplit(const ExplanationSplit &split, size_t rows,
                             size_t dropped_rows);

// Loads a post/explanation file. Throws LoadError naming the offending
// column or row on schema mismatch, and on an empty file.
ExplanationDataset LoadExplanationDataset(
    const std::filesystem::path &path, const ExplanationSchema &schema,
    const PreprocessConfig &preprocess = {});

// Same, from already-split text content (used by tests and tools).
ExplanationDataset ParseExplanationDataset(
    const std::string &content, const ExplanationSchema &schema,
    const PreprocessConfig &preprocess = {}, const std::string &origin = "");

Json RecordToJson(const ExplanationRecord &record);
ExplanationRecord RecordFromJson(const Json &json);

// Serialized form written by `prepare`: one JSON record per line.
void WriteSplit(const std::filesystem::path &path, const ExplanationSplit &split);
ExplanationSplit ReadSplit(const std::filesystem::path &path, SplitName name);

struct ToxicitySchema {
  TableFormat format = TableFormat::kCsv;
  std::string id = "id";  // optional; row number is used when absent
  std::string text = "text";
  std::array<std::string, 6> labels = {"toxicity", "severe_toxicity",
                                       "obscene",  "threat",
                                       "insult",   "identity_attack"};

  static ToxicitySchema FromJson(const Json &json);
};

// Loads toxicity regression records; every label must be present and lie
// in [0, 1].
ToxicitySplit LoadToxicityDataset(const std::filesystem::path &path,
                                  const ToxicitySchema &schema,
                                  const PreprocessConfig &preprocess = {});
ToxicitySplit ParseToxicityDataset(const std::string &content,
                                   const ToxicitySchema &schema,
                                   const PreprocessConfig &preprocess = {},
                                   const std::string &origin = "");

}  // namespace toxexplain::corpus

#endif  // TOXEXPLAIN_CORPUS_DATASET_H_
