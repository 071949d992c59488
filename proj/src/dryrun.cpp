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

#include "star/dryrun.hpp"

#include <thread>

#include <httplib.h>

#include "star/encoder.hpp"
#include "star/error.hpp"
#include "star/querygen.hpp"
#include "star/table.hpp"

namespace star {

using nlohmann::json;

namespace {

// Splits on unescaped " | " and removes escapes.
std::vector<std::string> split_header_line(std::string_view line) {
  std::vector<std::string> out(1);
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) {
      const char next = line[++i];
      out.back() += next == 'n' ? '\n' : next;
    } else if (line.substr(i, 3) == " | ") {
      out.emplace_back();
      i += 2;
    } else {
      out.back() += line[i];
    }
  }
  return out;
}

// Rebuilds the clustered table embedded in a generation prompt.
std::optional<Table> table_from_prompt(const std::string& prompt) {
  const std::string open = "### Input Table:\n";
  const std::string close = "\n\n### Your Task:";
  const auto b = prompt.find(open);
  const auto e = prompt.find(close);
  if (b == std::string::npos || e == std::string::npos || e < b + open.size()) return std::nullopt;
  const std::string text = prompt.substr(b + open.size(), e - b - open.size());
  Table t;
  t.id = "dry-run";
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line(text.data() + pos, nl - pos);
    if (line_no == 0) {
      t.header = split_header_line(line);
    } else {
      Row row;
      row.index = line_no - 1;
      try {
        for (auto& [col, val] : parse_row_text(line)) row.cells.push_back(std::move(val));
      } catch (const Error&) {
        return std::nullopt;
      }
      if (row.cells.size() != t.header.size()) return std::nullopt;
      t.rows.push_back(std::move(row));
    }
    ++line_no;
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  if (t.rows.empty()) return std::nullopt;
  return t;
}

}  // namespace

struct DryRunServer::Impl {
  Options options;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mu;
  Summary summary;

  void violation(httplib::Response& res, const std::string& what) {
    {
      std::lock_guard lock(mu);
      summary.violations.push_back(what);
    }
    res.status = 400;
    res.set_content(json{{"error", what}}.dump(), "application/json");
  }

  bool check_common(const httplib::Request& req, httplib::Response& res, const char* route,
                    const std::optional<std::string>& token, json& body) {
    if (req.get_header_value("Content-Type").rfind("application/json", 0) != 0) {
      violation(res, std::string(route) + ": Content-Type is not application/json");
      return false;
    }
    if (token && req.get_header_value("Authorization") != "Bearer " + *token) {
      violation(res, std::string(route) + ": missing or wrong bearer token");
      return false;
    }
    body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      violation(res, std::string(route) + ": body is not a JSON object");
      return false;
    }
    return true;
  }

  static bool only_keys(const json& body, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : body.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) == keys.end()) {
        return false;
      }
    }
    return true;
  }

  std::optional<std::string> answer_prompt(const json& prompt_value, httplib::Response& res, const char* route) {
    if (!prompt_value.is_string() || prompt_value.get<std::string>().empty()) {
      violation(res, std::string(route) + ": prompt must be a nonempty string");
      return std::nullopt;
    }
    const auto prompt = prompt_value.get<std::string>();
    if (prompt.rfind(std::string(prompt_template().substr(0, 40)), 0) != 0 ||
        prompt.find("### Output Format (JSON only):") == std::string::npos) {
      violation(res, std::string(route) + ": prompt does not follow the generation template");
      return std::nullopt;
    }
    auto table = table_from_prompt(prompt);
    if (!table) {
      violation(res, std::string(route) + ": prompt table could not be parsed");
      return std::nullopt;
    }
    return "Sure! " + json{{"query", template_query(*table)}}.dump() + " Hope that helps.";
  }

  void handle_embed(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!check_common(req, res, "/embed", options.embed_token, body)) return;
    if (!only_keys(body, {"texts"}) || !body.contains("texts") || !body["texts"].is_array() ||
        body["texts"].empty()) {
      violation(res, "/embed: request must be {\"texts\": [str, ...]}");
      return;
    }
    json embeddings = json::array();
    for (const auto& t : body["texts"]) {
      if (!t.is_string() || t.get<std::string>().empty()) {
        violation(res, "/embed: every text must be a nonempty string");
        return;
      }
      const auto v = reference_embed(t.get<std::string>(), options.dim, options.hash_seed);
      embeddings.push_back(std::vector<double>(v.values().begin(), v.values().end()));
    }
    {
      std::lock_guard lock(mu);
      ++summary.embed_requests;
      summary.texts_embedded += embeddings.size();
    }
    res.set_content(json{{"embeddings", std::move(embeddings)}, {"dim", options.dim}}.dump(), "application/json");
  }

  void handle_generate(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!check_common(req, res, "/generate", options.llm_token, body)) return;
    if (!only_keys(body, {"prompt", "temperature"}) || !body.contains("temperature") ||
        !body["temperature"].is_number() || !body.contains("prompt")) {
      violation(res, "/generate: request must be {\"prompt\": str, \"temperature\": number}");
      return;
    }
    auto text = answer_prompt(body["prompt"], res, "/generate");
    if (!text) return;
    {
      std::lock_guard lock(mu);
      ++summary.generate_requests;
    }
    res.set_content(json{{"text", *text}}.dump(), "application/json");
  }

  void handle_chat(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!check_common(req, res, "/chat/completions", options.llm_token, body)) return;
    const bool shape_ok = body.contains("model") && body["model"].is_string() && body.contains("messages") &&
                          body["messages"].is_array() && body["messages"].size() == 1 &&
                          body["messages"][0].is_object() && body["messages"][0].value("role", "") == "user" &&
                          body["messages"][0].contains("content") && body.contains("temperature") &&
                          body["temperature"].is_number();
    if (!shape_ok) {
      violation(res, "/chat/completions: request must carry model, one user message and temperature");
      return;
    }
    auto text = answer_prompt(body["messages"][0]["content"], res, "/chat/completions");
    if (!text) return;
    {
      std::lock_guard lock(mu);
      ++summary.chat_requests;
    }
    json reply = {{"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", *text}}}}})}};
    res.set_content(reply.dump(), "application/json");
  }
};

DryRunServer::DryRunServer(Options options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto* impl = impl_.get();
  impl->server.Post("/embed", [impl](const httplib::Request& q, httplib::Response& r) { impl->handle_embed(q, r); });
  impl->server.Post("/generate",
                    [impl](const httplib::Request& q, httplib::Response& r) { impl->handle_generate(q, r); });
  impl->server.Post("/chat/completions",
                    [impl](const httplib::Request& q, httplib::Response& r) { impl->handle_chat(q, r); });
  impl->port = impl->server.bind_to_any_port("127.0.0.1");
  if (impl->port <= 0) throw IoError("dry-run server could not bind a local port");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
}

DryRunServer::~DryRunServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string DryRunServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

DryRunServer::Summary DryRunServer::summary() const {
  std::lock_guard lock(impl_->mu);
  return impl_->summary;
}

json DryRunServer::summary_json() const {
  const auto s = summary();
  return {{"embed_requests", s.embed_requests},
          {"texts_embedded", s.texts_embedded},
          {"generate_requests", s.generate_requests},
          {"chat_requests", s.chat_requests},
          {"violations", s.violations}};
}

}  // namespace star
