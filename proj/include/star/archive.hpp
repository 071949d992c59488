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
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "star/fusion.hpp"
#include "star/table.hpp"

namespace star {

// One JSON object per line: vector plus provenance (partial table text,
// queries, weights, fingerprint).
nlohmann::json representation_to_json(const TableRepresentation& rep);
TableRepresentation representation_from_json(const nlohmann::json& j);

// Reads an archive, skipping a torn trailing line left by an interrupted run.
std::vector<TableRepresentation> read_archive(const std::filesystem::path& path);
void write_archive(const std::filesystem::path& path, const std::vector<TableRepresentation>& reps);

struct RepresentStats {
  std::size_t tables = 0;
  std::size_t computed = 0;
  std::size_t skipped = 0;  // fingerprint already present in the archive
  std::size_t failed = 0;
  std::vector<std::string> failures;  // "table id: message"
};

// Builds (or resumes building) the archive for every table of `corpus`.
// Finished tables are appended as they complete; the archive is rewritten in
// corpus order at the end. Per-table failures are collected, not thrown.
RepresentStats represent_corpus(const Corpus& corpus, const std::filesystem::path& archive_path,
                                const PipelineConfig& config, QueryGenerator& generator,
                                EncoderGateway& encoder, std::size_t workers);

}  // namespace star
