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

#ifndef TOXEXPLAIN_CORPUS_PREPROCESS_H_
#define TOXEXPLAIN_CORPUS_PREPROCESS_H_

#include <string>
#include <string_view>

namespace toxexplain::corpus {

// Placeholder strings substituted during preprocessing. These are part of
// the data contract: models are trained on text containing them.
struct PreprocessConfig {
  std::string url_token = "<url>";
  std::string user_token = "<user>";
  std::string nan_token = "<nan>";
  std::string removed_token = "<removed>";
};

// Normalizes a raw post or explanation:
//   - decodes the common HTML entities (&amp; &lt; &gt; &quot; &#39; &apos;)
//   - lowercases ASCII
//   - replaces URLs (http://, https://, www.) with the URL placeholder
//   - replaces @mentions with the user placeholder
//   - replaces the missing-value literal "nan" with the NAN placeholder
//   - replaces [removed] / [deleted] markup with the removed placeholder
//   - collapses whitespace
// The rules are applied until a fixed point, so the function is idempotent.
// An empty result means the record should be dropped.
std::string Preprocess(std::string_view text,
                       const PreprocessConfig &config = {});

inline bool IsDropCandidate(const std::string &preprocessed) {
  return preprocessed.empty();
}

}  // namespace toxexplain::corpus

#endif  // TOXEXPLAIN_CORPUS_PREPROCESS_H_
