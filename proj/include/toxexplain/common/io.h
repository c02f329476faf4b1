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

#ifndef TOXEXPLAIN_COMMON_IO_H_
#define TOXEXPLAIN_COMMON_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace toxexplain {

using Json = nlohmann::json;

std::string ReadFile(const std::filesystem::path &path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path &path,
                     const std::string &contents);

Json ReadJson(const std::filesystem::path &path);
void WriteJsonAtomic(const std::filesystem::path &path, const Json &value);

// One JSON object per non-blank line. Malformed lines raise LoadError with
// the line number.
std::vector<Json> ReadJsonLines(const std::filesystem::path &path);
void WriteJsonLinesAtomic(const std::filesystem::path &path,
                          const std::vector<Json> &rows);

// Delimited text. Fields may be double-quoted; quotes inside quoted
// fields are doubled. Quoted fields may span lines.
struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<size_t> lines;

  // Index of a header column, or -1.
  int Column(const std::string &name) const;
};

DelimitedTable ParseDelimited(const std::string &text, char delim);
DelimitedTable ReadDelimited(const std::filesystem::path &path, char delim);

// Quotes a field when it contains the delimiter, a quote or a newline.
std::string EscapeDelimited(const std::string &field, char delim = ',');
std::string FormatDelimitedRow(const std::vector<std::string> &fields,
                               char delim = ',');

}  // namespace toxexplain

#endif  // TOXEXPLAIN_COMMON_IO_H_
