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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace star {

// In-process HTTP stand-in for the embedding and generation services. It
// checks every request against the wire protocol and answers with reference
// embeddings and template queries wrapped in prose, so a remote-backed run
// reproduces the offline pipeline.
class DryRunServer {
 public:
  struct Options {
    std::size_t dim = 512;
    std::uint64_t hash_seed = 0;
    std::optional<std::string> embed_token;  // required bearer token, if set
    std::optional<std::string> llm_token;
  };

  struct Summary {
    std::size_t embed_requests = 0;
    std::size_t texts_embedded = 0;
    std::size_t generate_requests = 0;
    std::size_t chat_requests = 0;
    std::vector<std::string> violations;
  };

  explicit DryRunServer(Options options);
  ~DryRunServer();
  DryRunServer(const DryRunServer&) = delete;
  DryRunServer& operator=(const DryRunServer&) = delete;

  std::string base_url() const;
  Summary summary() const;
  nlohmann::json summary_json() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace star
