// Copyright 2026 The STAR Authors
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

#include "star/error.hpp"

namespace star {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kSchema: return "SchemaError";
    case ErrorKind::kArity: return "ArityError";
    case ErrorKind::kEmpty: return "EmptyError";
    case ErrorKind::kEmptyInput: return "EmptyInputError";
    case ErrorKind::kRemote: return "RemoteError";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatchError";
    case ErrorKind::kInconsistentAssignment: return "InconsistentAssignmentError";
    case ErrorKind::kDegenerateFusion: return "DegenerateFusionError";
    case ErrorKind::kDuplicateId: return "DuplicateIdError";
    case ErrorKind::kFingerprintMismatch: return "FingerprintMismatchError";
    case ErrorKind::kEmptyIndex: return "EmptyIndexError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kVersion: return "VersionError";
    case ErrorKind::kCorruptIndex: return "CorruptIndexError";
    case ErrorKind::kMissingGold: return "MissingGoldError";
    case ErrorKind::kGeneration: return "GenerationError";
  }
  return "Unknown";
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

std::string join_clusters(const std::vector<std::size_t>& clusters) {
  std::string out;
  for (auto c : clusters) {
    if (!out.empty()) out += ", ";
    out += std::to_string(c);
  }
  return out;
}

}  // namespace

MissingGoldError::MissingGoldError(std::vector<std::string> ids)
    : Error(ErrorKind::kMissingGold, "gold table ids missing from corpus: " + join_ids(ids)),
      ids_(std::move(ids)) {}

GenerationError::GenerationError(std::vector<std::size_t> clusters, const std::string& detail)
    : Error(ErrorKind::kGeneration,
            "query generation failed for clusters [" + join_clusters(clusters) + "]: " + detail),
      clusters_(std::move(clusters)) {}

}  // namespace star
