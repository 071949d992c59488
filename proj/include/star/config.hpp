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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "star/encoder.hpp"
#include "star/fusion.hpp"
#include "star/querygen.hpp"

namespace star {

struct DatasetSpec {
  std::string name;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> queries;
};

// Everything a command needs. Built from JSON; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 42;  // drives k-means initialization
  std::size_t parallelism = 4;
  std::string log_level = "warn";
  bool dry_run = false;

  EncoderConfig encoder;
  GenConfig generation;
  PipelineConfig pipeline;

  std::vector<double> lambdas;  // sweep grid; defaults to 0.1 ... 0.9
  bool sweep_dwf = true;
  std::vector<DatasetSpec> datasets;

  void validate() const;
};

// Starts from the defaults and applies every key present in `j`.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace star
