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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "star/clustering.hpp"
#include "star/embedding.hpp"
#include "star/encoder.hpp"
#include "star/querygen.hpp"
#include "star/table.hpp"

namespace star {

enum class FusionStrategy { kFixed, kDynamic, kConcat };

const char* to_string(FusionStrategy strategy);
FusionStrategy fusion_strategy_from_string(std::string_view name);

struct FusionConfig {
  FusionStrategy strategy = FusionStrategy::kDynamic;
  double lambda = 0.3;  // query weight for fixed fusion
  double beta = 0.5;    // similarity scale for dynamic fusion
  std::string query_separator = "\n";

  void validate() const;
};

struct FusionWeights {
  double w_t = 1.0;
  double w_q = 0.0;
  std::optional<double> similarity;  // dynamic fusion only
  bool clamped = false;              // dynamic fusion: beta * s fell outside [0, 1]

  bool operator==(const FusionWeights&) const = default;
};

// w_t * e_table + w_q * e_queries with w_t = 1 - w_q, before renormalization.
std::vector<double> fuse_raw(const EmbeddingVector& e_table, const EmbeddingVector& e_queries, double w_q);

std::pair<EmbeddingVector, FusionWeights> fuse_fixed(const EmbeddingVector& e_table,
                                                     const EmbeddingVector& e_queries, double lambda);

// w_q = clamp(beta * cos(e_table, e_queries), 0, 1).
std::pair<EmbeddingVector, FusionWeights> fuse_dynamic(const EmbeddingVector& e_table,
                                                       const EmbeddingVector& e_queries, double beta);

std::string join_queries(std::span<const SyntheticQuery> queries, std::string_view separator);

struct ComponentEmbeddings {
  EmbeddingVector e_table;
  EmbeddingVector e_queries;
};

// e_table = Encoder(partial table text); e_queries = Encoder(q_1 ⊕ ... ⊕ q_k).
ComponentEmbeddings encode_components(std::span<const std::string> header, const PartialTable& partial,
                                      std::span<const SyntheticQuery> queries,
                                      std::string_view separator, EncoderGateway& encoder);

// Which pipeline stages are active; the ablation variants switch these off.
struct PipelineFlags {
  bool use_scqg = true;    // false: first-k rows and one query over them
  bool use_wf = true;      // false: single encoding of table text + queries
  bool use_header = true;  // false: clustering on instance embeddings only

  bool operator==(const PipelineFlags&) const = default;
};

struct TableRepresentation {
  std::string table_id;
  EmbeddingVector e_t;
  FusionWeights weights;
  FusionStrategy strategy = FusionStrategy::kDynamic;
  std::vector<std::size_t> partial_rows;  // original indices, ascending
  std::string partial_table_text;
  std::vector<SyntheticQuery> queries;
  std::string queries_text;
  std::string fingerprint;
};

// Baseline: e_T = Encoder(partial text + "\n" + queries text), weights (1, 0).
TableRepresentation concat_representation(std::span<const std::string> header, const PartialTable& partial,
                                          std::span<const SyntheticQuery> queries,
                                          std::string_view separator, EncoderGateway& encoder);

// Hash over every hyperparameter that influences e_T.
std::string config_fingerprint(const ClusteringConfig& cluster_cfg, const FusionConfig& fusion_cfg,
                               const GenConfig& gen_cfg, const EncoderConfig& encoder_cfg,
                               const PipelineFlags& flags);

struct PipelineConfig {
  ClusteringConfig clustering;
  FusionConfig fusion;
  PipelineFlags flags;
};

// Header/row encoding, header-aware k-means, representative selection,
// per-cluster query generation and fusion for one table. Errors carry the
// table id and stage name.
TableRepresentation build_representation(const Table& table, const PipelineConfig& config,
                                         QueryGenerator& generator, EncoderGateway& encoder);

// The partial table the pipeline would use, without generation or fusion.
PartialTable build_partial_table(const Table& table, const PipelineConfig& config, EncoderGateway& encoder,
                                 ClusterAssignment* assignment_out = nullptr);

}  // namespace star
