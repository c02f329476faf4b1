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

#ifndef TOXEXPLAIN_COMMON_ERRORS_H_
#define TOXEXPLAIN_COMMON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace toxexplain {

// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not match its declared schema.
class LoadError : public Error {
 public:
  using Error::Error;
};

// An operation was called with arguments that violate its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Matrix shapes do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A dataset, checkpoint or cache file required by a run is missing.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace toxexplain

#endif  // TOXEXPLAIN_COMMON_ERRORS_H_
