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

#include "toxexplain/common/io.h"

#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "toxexplain/common/errors.h"
#include "toxexplain/common/text.h"

namespace toxexplain {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const fs::path &path, const std::string &contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

Json ReadJson(const fs::path &path) {
  std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception &e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void WriteJsonAtomic(const fs::path &path, const Json &value) {
  WriteFileAtomic(path, value.dump(2) + "\n");
}

std::vector<Json> ReadJsonLines(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open " + path.string());
  std::vector<Json> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::exception &e) {
      throw LoadError(path.string() + ":" + std::to_string(lineno) + ": " +
                      e.what());
    }
  }
  return rows;
}

void WriteJsonLinesAtomic(const fs::path &path, const std::vector<Json> &rows) {
  std::string out;
  for (const Json &row : rows) {
    out += row.dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

int DelimitedTable::Column(const std::string &name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

DelimitedTable ParseDelimited(const std::string &text, char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<size_t> lines;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  size_t record_line = 1;

  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    bool blank = record.size() == 1 && Trim(record[0]).empty();
    if (!blank) {
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\r') {
      // Swallowed; CRLF ends the record at '\n'.
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) {
    throw LoadError("unterminated quoted field starting near line " +
                    std::to_string(record_line));
  }
  if (field_started || !field.empty() || !record.empty()) end_record();

  DelimitedTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::string &h : table.header) h = Trim(h);
  for (size_t r = 1; r < records.size(); ++r) {
    table.rows.push_back(std::move(records[r]));
    table.lines.push_back(lines[r]);
  }
  return table;
}

DelimitedTable ReadDelimited(const fs::path &path, char delim) {
  return ParseDelimited(ReadFile(path), delim);
}

std::string EscapeDelimited(const std::string &field, char delim) {
  bool needs = field.find(delim) != std::string::npos ||
               field.find('"') != std::string::npos ||
               field.find('\n') != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string FormatDelimitedRow(const std::vector<std::string> &fields,
                               char delim) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += delim;
    out += EscapeDelimited(fields[i], delim);
  }
  return out;
}

}  // namespace toxexplain
