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

#include "eql/error.h"

namespace eql {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kDuplicateModel: return "DuplicateModel";
    case ErrorCode::kSetMismatch: return "SetMismatch";
    case ErrorCode::kProvenanceError: return "ProvenanceError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError: return 1;
    case ErrorCode::kIoError: return 3;
    default: return 2;
  }
}

}  // namespace eql
