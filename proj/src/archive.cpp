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

#include "star/archive.hpp"

#include <fstream>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/error.hpp"
#include "star/util.hpp"

namespace star {

using nlohmann::json;

json representation_to_json(const TableRepresentation& rep) {
  json j;
  j["table_id"] = rep.table_id;
  j["fingerprint"] = rep.fingerprint;
  j["strategy"] = to_string(rep.strategy);
  json w = {{"w_t", rep.weights.w_t}, {"w_q", rep.weights.w_q}, {"clamped", rep.weights.clamped}};
  if (rep.weights.similarity) w["similarity"] = *rep.weights.similarity;
  j["weights"] = std::move(w);
  j["partial_rows"] = rep.partial_rows;
  j["partial_table_text"] = rep.partial_table_text;
  json queries = json::array();
  for (const auto& q : rep.queries) {
    queries.push_back({{"text", q.text}, {"cluster", q.cluster_index}, {"backend", to_string(q.backend)}});
  }
  j["queries"] = std::move(queries);
  j["queries_text"] = rep.queries_text;
  j["e_t"] = std::vector<double>(rep.e_t.values().begin(), rep.e_t.values().end());
  return j;
}

TableRepresentation representation_from_json(const json& j) {
  TableRepresentation rep;
  rep.table_id = j.at("table_id").get<std::string>();
  rep.fingerprint = j.at("fingerprint").get<std::string>();
  rep.strategy = fusion_strategy_from_string(j.at("strategy").get<std::string>());
  const auto& w = j.at("weights");
  rep.weights.w_t = w.at("w_t").get<double>();
  rep.weights.w_q = w.at("w_q").get<double>();
  rep.weights.clamped = w.value("clamped", false);
  if (w.contains("similarity")) rep.weights.similarity = w["similarity"].get<double>();
  rep.partial_rows = j.at("partial_rows").get<std::vector<std::size_t>>();
  rep.partial_table_text = j.at("partial_table_text").get<std::string>();
  for (const auto& q : j.at("queries")) {
    rep.queries.push_back({q.at("text").get<std::string>(), q.at("cluster").get<std::size_t>(), rep.table_id,
                           gen_backend_from_string(q.at("backend").get<std::string>())});
  }
  rep.queries_text = j.at("queries_text").get<std::string>();
  rep.e_t = EmbeddingVector::from_unit(j.at("e_t").get<std::vector<double>>());
  return rep;
}

std::vector<TableRepresentation> read_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open archive '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) lines.push_back(std::move(line));
  }
  std::vector<TableRepresentation> reps;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    json j = json::parse(lines[i], nullptr, false);
    const bool last = i + 1 == lines.size();
    try {
      if (j.is_discarded()) throw ParseError(i + 1, "malformed archive record");
      reps.push_back(representation_from_json(j));
    } catch (const std::exception& e) {
      if (last) {
        spdlog::warn("ignoring torn last record in archive '{}'", path.string());
        break;
      }
      throw ParseError(i + 1, std::string("archive '") + path.string() + "': " + e.what());
    }
  }
  return reps;
}

void write_archive(const std::filesystem::path& path, const std::vector<TableRepresentation>& reps) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write archive '" + tmp.string() + "'");
    for (const auto& rep : reps) out << representation_to_json(rep).dump() << '\n';
    if (!out) throw IoError("write failed for archive '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move archive into place: " + ec.message());
}

RepresentStats represent_corpus(const Corpus& corpus, const std::filesystem::path& archive_path,
                                const PipelineConfig& config, QueryGenerator& generator,
                                EncoderGateway& encoder, std::size_t workers) {
  const std::string fingerprint =
      config_fingerprint(config.clustering, config.fusion, generator.config(), encoder.config(), config.flags);
  std::map<std::string, TableRepresentation> done;
  if (std::filesystem::exists(archive_path)) {
    for (auto& rep : read_archive(archive_path)) {
      if (rep.fingerprint == fingerprint && corpus.contains(rep.table_id)) {
        std::string id = rep.table_id;
        done.insert_or_assign(std::move(id), std::move(rep));
      }
    }
  }
  RepresentStats stats;
  stats.tables = corpus.size();
  if (corpus.empty()) spdlog::warn("corpus has no tables; writing an empty archive");

  std::vector<const Table*> todo;
  for (const auto& t : corpus) {
    if (done.contains(t.id)) ++stats.skipped;
    else todo.push_back(&t);
  }
  // Keep already-finished records, then append new ones as they complete.
  {
    std::vector<TableRepresentation> kept;
    for (const auto& t : corpus) {
      if (auto it = done.find(t.id); it != done.end()) kept.push_back(it->second);
    }
    write_archive(archive_path, kept);
  }
  std::mutex mu;
  std::ofstream append(archive_path, std::ios::app);
  if (!append) throw IoError("cannot append to archive '" + archive_path.string() + "'");
  std::vector<std::string> errors(todo.size());
  parallel_for(todo.size(), workers, [&](std::size_t i) {
    try {
      auto rep = build_representation(*todo[i], config, generator, encoder);
      std::lock_guard lock(mu);
      append << representation_to_json(rep).dump() << '\n' << std::flush;
      done.insert_or_assign(rep.table_id, std::move(rep));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  append.close();
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (errors[i].empty()) {
      ++stats.computed;
    } else {
      ++stats.failed;
      stats.failures.push_back(todo[i]->id + ": " + errors[i]);
    }
  }
  std::vector<TableRepresentation> ordered;
  for (const auto& t : corpus) {
    if (auto it = done.find(t.id); it != done.end()) ordered.push_back(it->second);
  }
  write_archive(archive_path, ordered);
  return stats;
}

}  // namespace star
