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

#include "star/fusion.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "star/error.hpp"

namespace star {

const char* to_string(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::kFixed: return "fixed";
    case FusionStrategy::kDynamic: return "dynamic";
    case FusionStrategy::kConcat: return "concat";
  }
  return "unknown";
}

FusionStrategy fusion_strategy_from_string(std::string_view name) {
  if (name == "fixed") return FusionStrategy::kFixed;
  if (name == "dynamic") return FusionStrategy::kDynamic;
  if (name == "concat") return FusionStrategy::kConcat;
  throw InvalidArgumentError("unknown fusion strategy '" + std::string(name) + "'");
}

void FusionConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgumentError("lambda must be in [0, 1]");
  if (!(beta >= 0.0)) throw InvalidArgumentError("beta must be >= 0");
}

std::vector<double> fuse_raw(const EmbeddingVector& e_table, const EmbeddingVector& e_queries, double w_q) {
  require_same_dim(e_table.dim(), e_queries.dim(), "fusion");
  const double w_t = 1.0 - w_q;
  std::vector<double> raw(e_table.dim());
  for (std::size_t d = 0; d < raw.size(); ++d) raw[d] = w_t * e_table[d] + w_q * e_queries[d];
  return raw;
}

std::pair<EmbeddingVector, FusionWeights> fuse_fixed(const EmbeddingVector& e_table,
                                                     const EmbeddingVector& e_queries, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgumentError("lambda must be in [0, 1]");
  auto raw = fuse_raw(e_table, e_queries, lambda);
  if (l2_norm(raw) < 1e-12) {
    throw DegenerateFusionError("fused vector vanished (antipodal inputs at equal weight)");
  }
  return {EmbeddingVector::normalized(std::move(raw)), FusionWeights{1.0 - lambda, lambda, std::nullopt, false}};
}

std::pair<EmbeddingVector, FusionWeights> fuse_dynamic(const EmbeddingVector& e_table,
                                                       const EmbeddingVector& e_queries, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgumentError("beta must be >= 0");
  const double s = dot(e_table.values(), e_queries.values());
  const double scaled = beta * s;
  const double w_q = std::clamp(scaled, 0.0, 1.0);
  auto [vec, weights] = fuse_fixed(e_table, e_queries, w_q);
  weights.similarity = s;
  weights.clamped = w_q != scaled;
  if (weights.clamped) spdlog::debug("dynamic fusion clamped w_q from {} to {}", scaled, w_q);
  return {std::move(vec), weights};
}

std::string join_queries(std::span<const SyntheticQuery> queries, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (i > 0) out += separator;
    out += queries[i].text;
  }
  return out;
}

ComponentEmbeddings encode_components(std::span<const std::string> header, const PartialTable& partial,
                                      std::span<const SyntheticQuery> queries,
                                      std::string_view separator, EncoderGateway& encoder) {
  if (queries.empty()) throw EmptyError("no synthetic queries to encode");
  const std::vector<std::string> texts = {serialize_partial_table(header, partial.rows()),
                                          join_queries(queries, separator)};
  auto vecs = encoder.encode_batch(texts);
  return {std::move(vecs[0]), std::move(vecs[1])};
}

TableRepresentation concat_representation(std::span<const std::string> header, const PartialTable& partial,
                                          std::span<const SyntheticQuery> queries,
                                          std::string_view separator, EncoderGateway& encoder) {
  if (queries.empty()) throw EmptyError("no synthetic queries to encode");
  TableRepresentation rep;
  rep.table_id = partial.table_id;
  rep.strategy = FusionStrategy::kConcat;
  rep.partial_table_text = serialize_partial_table(header, partial.rows());
  rep.queries.assign(queries.begin(), queries.end());
  rep.queries_text = join_queries(queries, separator);
  rep.e_t = encoder.encode(rep.partial_table_text + "\n" + rep.queries_text);
  rep.weights = FusionWeights{1.0, 0.0, std::nullopt, false};
  for (const auto& r : partial.representatives) rep.partial_rows.push_back(r.row.index);
  return rep;
}

}  // namespace star
