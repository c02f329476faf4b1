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

#include "toxexplain/corpus/preprocess.h"

#include <array>
#include <utility>
#include <vector>

#include "toxexplain/common/text.h"

namespace toxexplain::corpus {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 6>
    kEntities = {{{"&amp;", "&"},
                  {"&lt;", "<"},
                  {"&gt;", ">"},
                  {"&quot;", "\""},
                  {"&#39;", "'"},
                  {"&apos;", "'"}}};

std::string DecodeEntities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    if (text[i] == '&') {
      for (const auto &[entity, value] : kEntities) {
        if (text.substr(i, entity.size()) == entity) {
          out.append(value);
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(text[i++]);
  }
  return out;
}

bool IsHandleChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

std::string RewriteToken(const std::string &token,
                         const PreprocessConfig &config) {
  if (token == "nan") return config.nan_token;
  if (token == "[removed]" || token == "[deleted]") return config.removed_token;

  size_t url = std::string::npos;
  for (std::string_view marker : {"http://", "https://", "www."}) {
    size_t pos = token.find(marker);
    if (pos != std::string::npos && pos < url) url = pos;
  }
  if (url != std::string::npos) {
    return token.substr(0, url) + config.url_token;
  }

  if (token.size() > 1 && token[0] == '@' && IsHandleChar(token[1])) {
    size_t end = 1;
    while (end < token.size() && IsHandleChar(token[end])) ++end;
    return config.user_token + token.substr(end);
  }
  return token;
}

std::string PreprocessOnce(std::string_view text,
                           const PreprocessConfig &config) {
  std::string lowered = ToLowerAscii(DecodeEntities(text));
  std::vector<std::string> tokens = SplitWhitespace(lowered);
  for (std::string &token : tokens) token = RewriteToken(token, config);
  return Join(tokens, " ");
}

}  // namespace

std::string Preprocess(std::string_view text, const PreprocessConfig &config) {
  std::string current = PreprocessOnce(text, config);
  // Entity decoding can expose a new entity ("&amp;lt;"), so iterate to a
  // fixed point.
  for (int pass = 0; pass < 8; ++pass) {
    std::string next = PreprocessOnce(current, config);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

}  // namespace toxexplain::corpus
