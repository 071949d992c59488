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

#include "star/querygen.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/error.hpp"
#include "star/util.hpp"

namespace star {

using nlohmann::json;

const char* to_string(GenBackend backend) {
  return backend == GenBackend::kRemote ? "remote" : "template";
}

GenBackend gen_backend_from_string(std::string_view name) {
  if (name == "remote") return GenBackend::kRemote;
  if (name == "template") return GenBackend::kTemplate;
  throw InvalidArgumentError("unknown generation backend '" + std::string(name) + "'");
}

const char* to_string(GenApi api) { return api == GenApi::kNative ? "native" : "openai"; }

GenApi gen_api_from_string(std::string_view name) {
  if (name == "native") return GenApi::kNative;
  if (name == "openai") return GenApi::kOpenAiChat;
  throw InvalidArgumentError("unknown generation api '" + std::string(name) + "'");
}

void GenConfig::validate() const {
  if (retries < 0) throw InvalidArgumentError("generation retries must be >= 0");
  if (backend == GenBackend::kRemote && endpoint.empty()) {
    throw InvalidArgumentError("remote generation requires an endpoint");
  }
  if (max_in_flight < 1) throw InvalidArgumentError("generation in-flight limit must be >= 1");
}

namespace {

constexpr std::string_view kPrompt =
    R"(You are an expert at analyzing tables and generating a diverse, natural query that could be answered using the table data.

### Input Table:
{clustered_table}

### Your Task:
Generate **one query** based on the actual content and structure of this table.

### Query Types (choose the most appropriate):
- Numerical: "What is the average 'Sales' in 'Region' X?"
- List: "List all 'Products' with 'Price' above 100"
- Count: "How many 'Orders' have 'Status' = shipped?"
- Select: "Which 'Employee' has the highest 'Revenue'?"

### Important Requirements:
- Use **natural, conversational language**
- Make the query **specific to the actual content** in the table
- Reference real values, names, or entities that appear in the table when possible
- For fact-verification style tables, focus on entity-specific and temporal queries
- For reasoning-oriented tables, include multi-step or conditional queries
- **Language code: {lang}**: Generate the query in this language

### Output Format (JSON only):
{"query": "your query here"}

Generate the query now:)";

void replace_once(std::string& s, std::string_view slot, std::string_view value) {
  const auto pos = s.find(slot);
  if (pos != std::string::npos) s.replace(pos, slot.size(), value);
}

// End (exclusive) of the balanced {...} starting at `start`, skipping braces in strings.
std::optional<std::size_t> balanced_object_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::nullopt;
}

}  // namespace

std::string_view prompt_template() { return kPrompt; }

std::string build_prompt(const Table& subtable, std::string_view lang, std::size_t max_rows) {
  if (subtable.rows.empty()) throw EmptyError("sub-table '" + subtable.id + "' has no rows");
  std::vector<Row> rows = subtable.rows;
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.index < b.index; });
  if (max_rows > 0 && rows.size() > max_rows) rows.resize(max_rows);
  std::string prompt(kPrompt);
  // {lang} first: the table text may itself contain the literal "{lang}".
  replace_once(prompt, "{lang}", lang);
  replace_once(prompt, "{clustered_table}", serialize_partial_table(subtable.header, rows));
  return prompt;
}

std::optional<std::string> extract_query(std::string_view response) {
  for (std::size_t pos = response.find('{'); pos != std::string_view::npos;
       pos = response.find('{', pos + 1)) {
    const auto end = balanced_object_end(response, pos);
    if (!end) continue;
    json obj = json::parse(response.substr(pos, *end - pos), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    auto it = obj.find("query");
    if (it == obj.end() || !it->is_string()) continue;
    std::string q = trim(it->get<std::string>());
    if (!q.empty()) return q;
  }
  return std::nullopt;
}

std::string template_query(const Table& subtable) {
  if (subtable.rows.empty()) throw EmptyError("sub-table '" + subtable.id + "' has no rows");
  if (subtable.header.empty()) throw EmptyError("sub-table '" + subtable.id + "' has no header");
  std::size_t best_col = 0;
  std::size_t best_distinct = 0;
  for (std::size_t c = 0; c < subtable.header.size(); ++c) {
    std::set<std::string_view> values;
    for (const auto& r : subtable.rows) values.insert(r.cells.at(c));
    if (values.size() > best_distinct) {
      best_distinct = values.size();
      best_col = c;
    }
  }
  std::map<std::string_view, std::size_t> freq;
  for (const auto& r : subtable.rows) ++freq[r.cells[best_col]];
  std::string_view value;
  std::size_t value_count = 0;
  for (const auto& [v, n] : freq) {  // map order is lexicographic
    if (n > value_count) {
      value = v;
      value_count = n;
    }
  }
  return "Which " + subtable.header[0] + " has " + subtable.header[best_col] + " equal to " +
         std::string(value) + "?";
}

QueryGenerator::QueryGenerator(GenConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  token_ = config_.auth_token;
  if (token_.empty()) {
    if (const char* env = std::getenv("STAR_LLM_TOKEN")) token_ = env;
  }
  if (config_.backend == GenBackend::kRemote && !transport_) {
    transport_ = make_http_transport(config_.endpoint, std::chrono::milliseconds(config_.timeout_ms));
  }
}

std::optional<std::string> QueryGenerator::remote_attempt(const std::string& prompt, HttpResponse& last) {
  json request;
  std::string path;
  if (config_.api == GenApi::kNative) {
    path = "/generate";
    request["prompt"] = prompt;
    request["temperature"] = config_.temperature;
  } else {
    path = "/chat/completions";
    request["model"] = config_.model;
    request["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    request["temperature"] = config_.temperature;
  }
  HttpHeaders headers;
  if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);
  ++requests_;
  last = transport_->post(path, request.dump(), headers);
  if (last.status != 200) return std::nullopt;
  json body = json::parse(last.body, nullptr, false);
  std::string text;
  if (!body.is_discarded() && body.is_object()) {
    if (config_.api == GenApi::kNative) {
      if (body.contains("text") && body["text"].is_string()) text = body["text"].get<std::string>();
    } else if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty()) {
      const auto& choice = body["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        text = choice["message"]["content"].get<std::string>();
      }
    }
  }
  auto query = extract_query(text);
  if (!query) last.body = "no usable query in response: " + last.body.substr(0, 200);
  return query;
}

SyntheticQuery QueryGenerator::generate(const Table& subtable, std::size_t cluster_index,
                                        const std::string& table_id) {
  if (subtable.rows.empty()) throw EmptyError("sub-table '" + subtable.id + "' has no rows");
  SyntheticQuery q;
  q.cluster_index = cluster_index;
  q.table_id = table_id;
  if (config_.backend == GenBackend::kRemote) {
    const std::string prompt =
        build_prompt(subtable, config_.lang.value_or(subtable.lang), config_.max_prompt_rows);
    const std::string memo_key =
        sha256_hex(table_id + '\x1f' + std::to_string(cluster_index) + '\x1f' + prompt);
    {
      std::lock_guard lock(memo_mu_);
      if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    }
    HttpResponse last;
    std::optional<std::string> text;
    retry_with_backoff(config_.retries + 1, std::chrono::milliseconds(config_.backoff_ms), [&](int) {
      text = remote_attempt(prompt, last);
      return text.has_value();
    });
    if (text) {
      q.text = std::move(*text);
      q.backend = GenBackend::kRemote;
    } else {
      if (!config_.fallback) throw RemoteError(last.status, last.body);
      spdlog::warn("table '{}' cluster {}: generation failed (status {}), using template fallback",
                   table_id, cluster_index, last.status);
      q.text = template_query(subtable);
      q.backend = GenBackend::kTemplate;
    }
    std::lock_guard lock(memo_mu_);
    memo_.emplace(memo_key, q);
    return q;
  }
  q.text = template_query(subtable);
  q.backend = GenBackend::kTemplate;
  return q;
}

std::vector<SyntheticQuery> QueryGenerator::generate_all(const std::vector<Table>& subtables,
                                                         const std::string& table_id) {
  std::vector<SyntheticQuery> out(subtables.size());
  std::vector<std::string> errors(subtables.size());
  const std::size_t workers = config_.backend == GenBackend::kRemote ? config_.max_in_flight : 1;
  parallel_for(subtables.size(), workers, [&](std::size_t j) {
    try {
      out[j] = generate(subtables[j], j, table_id);
    } catch (const RemoteError& e) {
      errors[j] = e.what();
    }
  });
  std::vector<std::size_t> failed;
  std::string detail;
  for (std::size_t j = 0; j < errors.size(); ++j) {
    if (errors[j].empty()) continue;
    failed.push_back(j);
    if (detail.empty()) detail = errors[j];
  }
  if (!failed.empty()) throw GenerationError(std::move(failed), detail);
  return out;
}

std::vector<SyntheticQuery> QueryGenerator::generate_all(const Table& table,
                                                         const ClusterAssignment& assignment) {
  return generate_all(cluster_subtables(table, assignment), table.id);
}

}  // namespace star
