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

#include <algorithm>

#include <nlohmann/json.hpp>

#include "star/error.hpp"
#include "star/fusion.hpp"
#include "star/util.hpp"

namespace star {

using nlohmann::json;

std::string config_fingerprint(const ClusteringConfig& cluster_cfg, const FusionConfig& fusion_cfg,
                               const GenConfig& gen_cfg, const EncoderConfig& encoder_cfg,
                               const PipelineFlags& flags) {
  json j;
  j["clustering"] = {{"alpha", cluster_cfg.alpha},
                     {"k", cluster_cfg.k},
                     {"max_iters", cluster_cfg.max_iters},
                     {"tol", cluster_cfg.tol},
                     {"seed", cluster_cfg.seed}};
  j["fusion"] = {{"strategy", to_string(fusion_cfg.strategy)},
                 {"lambda", fusion_cfg.lambda},
                 {"beta", fusion_cfg.beta},
                 {"separator", fusion_cfg.query_separator}};
  j["generation"] = {{"backend", to_string(gen_cfg.backend)},
                     {"api", to_string(gen_cfg.api)},
                     {"endpoint", gen_cfg.backend == GenBackend::kRemote ? gen_cfg.endpoint : ""},
                     {"model", gen_cfg.backend == GenBackend::kRemote ? gen_cfg.model : ""},
                     {"temperature", gen_cfg.temperature},
                     {"max_prompt_rows", gen_cfg.max_prompt_rows},
                     {"lang", gen_cfg.lang.value_or("")}};
  j["encoder"] = {{"backend", to_string(encoder_cfg.backend)},
                  {"dim", encoder_cfg.dim},
                  {"hash_seed", encoder_cfg.hash_seed},
                  {"endpoint", encoder_cfg.backend == EncoderBackend::kRemote ? encoder_cfg.endpoint : ""}};
  j["flags"] = {{"scqg", flags.use_scqg}, {"wf", flags.use_wf}, {"header", flags.use_header}};
  return sha256_hex(j.dump());
}

namespace {

template <typename Fn>
auto run_stage(const Table& table, const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    e.add_context("table '" + table.id + "' stage '" + stage + "'");
    throw;
  }
}

std::vector<Row> rows_by_index(const Table& table) {
  std::vector<Row> rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.index < b.index; });
  return rows;
}

}  // namespace

PartialTable build_partial_table(const Table& table, const PipelineConfig& config, EncoderGateway& encoder,
                                 ClusterAssignment* assignment_out) {
  config.clustering.validate();
  if (table.rows.empty()) throw EmptyError("table '" + table.id + "' has no rows");
  const std::vector<Row> rows = rows_by_index(table);

  if (!config.flags.use_scqg) {
    PartialTable partial;
    partial.table_id = table.id;
    const std::size_t take = std::min(config.clustering.k, rows.size());
    for (std::size_t i = 0; i < take; ++i) partial.representatives.push_back({rows[i], 0});
    if (assignment_out) *assignment_out = ClusterAssignment{};
    return partial;
  }

  std::vector<std::string> texts;
  texts.reserve(rows.size() + 1);
  texts.push_back(serialize_header(table.header));
  for (const auto& r : rows) texts.push_back(serialize_row(table.header, r));
  const auto vecs = run_stage(table, "encode", [&] { return encoder.encode_batch(texts); });

  const double alpha = config.flags.use_header ? config.clustering.alpha : 0.0;
  const auto e_rows = std::span<const EmbeddingVector>(vecs).subspan(1);
  const auto points = header_aware_embeddings(vecs.front(), e_rows, alpha);
  const auto& cc = config.clustering;
  ClusterAssignment assignment =
      run_stage(table, "cluster", [&] { return kmeans(points, cc.k, cc.seed, cc.max_iters, cc.tol); });
  PartialTable partial = run_stage(
      table, "select", [&] { return select_representatives(table.id, points, rows, assignment); });
  if (assignment_out) *assignment_out = std::move(assignment);
  return partial;
}

TableRepresentation build_representation(const Table& table, const PipelineConfig& config,
                                         QueryGenerator& generator, EncoderGateway& encoder) {
  config.fusion.validate();
  ClusterAssignment assignment;
  const PartialTable partial = build_partial_table(table, config, encoder, &assignment);

  std::vector<Table> subtables;
  if (config.flags.use_scqg) {
    Table sorted = table;
    sorted.rows = rows_by_index(table);
    // Labels follow the index-sorted row order used for clustering.
    subtables = cluster_subtables(sorted, assignment);
  } else {
    Table direct;
    direct.id = table.id + "#top";
    direct.title = table.title;
    direct.lang = table.lang;
    direct.header = table.header;
    direct.rows = partial.rows();
    subtables.push_back(std::move(direct));
  }
  const auto queries = run_stage(table, "generate", [&] { return generator.generate_all(subtables, table.id); });

  const std::string& sep = config.fusion.query_separator;
  TableRepresentation rep = run_stage(table, "fuse", [&] {
    if (!config.flags.use_wf || config.fusion.strategy == FusionStrategy::kConcat) {
      return concat_representation(table.header, partial, queries, sep, encoder);
    }
    auto components = encode_components(table.header, partial, queries, sep, encoder);
    auto fused = config.fusion.strategy == FusionStrategy::kFixed
                     ? fuse_fixed(components.e_table, components.e_queries, config.fusion.lambda)
                     : fuse_dynamic(components.e_table, components.e_queries, config.fusion.beta);
    TableRepresentation r;
    r.table_id = table.id;
    r.e_t = std::move(fused.first);
    r.weights = fused.second;
    r.strategy = config.fusion.strategy;
    r.partial_table_text = serialize_partial_table(table.header, partial.rows());
    r.queries = queries;
    r.queries_text = join_queries(queries, sep);
    for (const auto& rp : partial.representatives) r.partial_rows.push_back(rp.row.index);
    return r;
  });
  rep.fingerprint =
      config_fingerprint(config.clustering, config.fusion, generator.config(), encoder.config(), config.flags);
  return rep;
}

}  // namespace star
