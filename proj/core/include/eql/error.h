// Copyright 2026 The Eqlboard Authors.
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

#ifndef EQL_ERROR_H_
#define EQL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace eql {

// Machine-readable failure categories. The names double as the `error`
// field of API error bodies, so keep them stable.
enum class ErrorCode {
  kUnknownLabel,
  kMissingPrediction,
  kParseError,
  kDuplicateId,
  kEmptyCorpus,
  kRangeError,
  kDimMismatch,
  kConfigError,
  kDegenerateLabels,
  kNonFiniteInput,
  kMissingEmbedding,
  kDuplicateModel,
  kSetMismatch,
  kProvenanceError,
  kNotFound,
  kIoError,
};

std::string_view ErrorName(ErrorCode code);

// Process exit status for a failure: 1 usage/config, 2 data, 3 environment.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  std::string_view name() const { return ErrorName(code_); }

 private:
  ErrorCode code_;
};

}  // namespace eql

#endif  // EQL_ERROR_H_
