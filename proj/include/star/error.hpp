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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace star {

// Stable error kinds. The C API maps these one-to-one onto star_status codes.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kSchema,
  kArity,
  kEmpty,
  kEmptyInput,
  kRemote,
  kDimensionMismatch,
  kInconsistentAssignment,
  kDegenerateFusion,
  kDuplicateId,
  kFingerprintMismatch,
  kEmptyIndex,
  kIo,
  kVersion,
  kCorruptIndex,
  kMissingGold,
  kGeneration,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(message), kind_(kind), message_(std::move(message)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* what() const noexcept override { return message_.c_str(); }

  // Prefixes the message in place; used with `throw;` so the dynamic type survives.
  void add_context(const std::string& context) { message_ = context + ": " + message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

#define STAR_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(std::string message) : Error(Kind, std::move(message)) {} \
  };

STAR_DEFINE_ERROR(InvalidArgumentError, ErrorKind::kInvalidArgument)
STAR_DEFINE_ERROR(SchemaError, ErrorKind::kSchema)
STAR_DEFINE_ERROR(ArityError, ErrorKind::kArity)
STAR_DEFINE_ERROR(EmptyError, ErrorKind::kEmpty)
STAR_DEFINE_ERROR(DimensionMismatchError, ErrorKind::kDimensionMismatch)
STAR_DEFINE_ERROR(InconsistentAssignmentError, ErrorKind::kInconsistentAssignment)
STAR_DEFINE_ERROR(DegenerateFusionError, ErrorKind::kDegenerateFusion)
STAR_DEFINE_ERROR(DuplicateIdError, ErrorKind::kDuplicateId)
STAR_DEFINE_ERROR(FingerprintMismatchError, ErrorKind::kFingerprintMismatch)
STAR_DEFINE_ERROR(EmptyIndexError, ErrorKind::kEmptyIndex)
STAR_DEFINE_ERROR(IoError, ErrorKind::kIo)
STAR_DEFINE_ERROR(VersionError, ErrorKind::kVersion)
STAR_DEFINE_ERROR(CorruptIndexError, ErrorKind::kCorruptIndex)

#undef STAR_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Empty text handed to an encoder. `index` is set when the text came from a batch.
class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(std::optional<std::size_t> index = std::nullopt)
      : Error(ErrorKind::kEmptyInput,
              index ? "empty input text at index " + std::to_string(*index) : "empty input text"),
        index_(index) {}
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class RemoteError : public Error {
 public:
  RemoteError(int status, std::string body)
      : Error(ErrorKind::kRemote,
              "remote call failed (status " + std::to_string(status) + "): " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class MissingGoldError : public Error {
 public:
  explicit MissingGoldError(std::vector<std::string> ids);
  const std::vector<std::string>& missing_ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// Raised by query generation when fallback is disabled and some clusters failed.
class GenerationError : public Error {
 public:
  GenerationError(std::vector<std::size_t> clusters, const std::string& detail);
  const std::vector<std::size_t>& failed_clusters() const noexcept { return clusters_; }

 private:
  std::vector<std::size_t> clusters_;
};

}  // namespace star
