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

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "star/clustering.hpp"
#include "star/http.hpp"
#include "star/table.hpp"

namespace star {

enum class GenBackend { kRemote, kTemplate };
// Wire dialect of the remote backend.
enum class GenApi { kNative, kOpenAiChat };

const char* to_string(GenBackend backend);
GenBackend gen_backend_from_string(std::string_view name);
const char* to_string(GenApi api);
GenApi gen_api_from_string(std::string_view name);

struct GenConfig {
  GenBackend backend = GenBackend::kTemplate;
  GenApi api = GenApi::kNative;
  std::string endpoint;
  std::string model = "llama-3.1-8b-instruct";
  std::string auth_token;  // falls back to $STAR_LLM_TOKEN
  double temperature = 0.0;
  int timeout_ms = 60000;
  int retries = 2;
  int backoff_ms = 250;
  std::size_t max_in_flight = 4;
  std::size_t max_prompt_rows = 0;  // 0 keeps every row of the sub-table
  std::optional<std::string> lang;
  bool fallback = true;

  void validate() const;
};

struct SyntheticQuery {
  std::string text;
  std::size_t cluster_index = 0;
  std::string table_id;
  GenBackend backend = GenBackend::kTemplate;

  bool operator==(const SyntheticQuery&) const = default;
};

// The query-generation prompt with its two slots, {clustered_table} and {lang}.
std::string_view prompt_template();

std::string build_prompt(const Table& subtable, std::string_view lang, std::size_t max_rows = 0);

// First JSON object in `response` carrying a nonempty string "query".
std::optional<std::string> extract_query(std::string_view response);

// "Which {header[0]} has {header[c]} equal to {v}?" where c has the most
// distinct values (ties: lowest index) and v is c's most frequent value
// (ties: lexicographically smallest).
std::string template_query(const Table& subtable);

class QueryGenerator {
 public:
  explicit QueryGenerator(GenConfig config, std::shared_ptr<HttpTransport> transport = nullptr);

  // One query for one sub-table. Remote failures fall back to the template
  // backend when enabled; otherwise RemoteError.
  SyntheticQuery generate(const Table& subtable, std::size_t cluster_index, const std::string& table_id);

  // Exactly one query per sub-table, in cluster order.
  std::vector<SyntheticQuery> generate_all(const std::vector<Table>& subtables, const std::string& table_id);
  std::vector<SyntheticQuery> generate_all(const Table& table, const ClusterAssignment& assignment);

  const GenConfig& config() const { return config_; }
  std::size_t requests() const { return requests_.load(); }

 private:
  std::optional<std::string> remote_attempt(const std::string& prompt, HttpResponse& last);

  GenConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::string token_;
  std::atomic<std::size_t> requests_{0};
  // Remote answers keyed by (table, cluster, prompt); variants that share a
  // partial table reuse the same queries.
  std::mutex memo_mu_;
  std::map<std::string, SyntheticQuery> memo_;
};

}  // namespace star
