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
#include <span>
#include <string>
#include <vector>

#include "star/embedding.hpp"
#include "star/table.hpp"

namespace star {

struct ClusteringConfig {
  double alpha = 0.2;  // header weight in the header-aware embedding
  std::size_t k = 10;
  std::size_t max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 42;

  void validate() const;
};

using Point = std::vector<double>;

struct ClusterAssignment {
  std::vector<std::size_t> labels;  // per point, in [0, k_effective)
  std::vector<Point> centroids;     // k_effective means
  std::size_t k_effective = 0;
  std::size_t iterations = 0;
  bool converged = false;

  std::vector<std::vector<std::size_t>> members() const;
};

struct Representative {
  Row row;
  std::size_t cluster = 0;
};

struct PartialTable {
  std::string table_id;
  std::vector<Representative> representatives;  // ascending original row index

  std::vector<Row> rows() const;
};

// alpha * e_header + (1 - alpha) * e_rows[i], without renormalization.
std::vector<Point> header_aware_embeddings(const EmbeddingVector& e_header,
                                           std::span<const EmbeddingVector> e_rows, double alpha);

std::vector<Point> as_points(std::span<const EmbeddingVector> vectors);

// Lloyd's algorithm from a seeded k-means++ start. k_effective is
// min(k, number of distinct points). Centroids returned are exactly the means
// of the returned labels. Deterministic in (points, k, seed, max_iters, tol).
ClusterAssignment kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iters = 100, double tol = 1e-6);

// Member closest to each centroid (squared Euclidean); ties go to the smaller
// original row index.
PartialTable select_representatives(const std::string& table_id, std::span<const Point> points,
                                    std::span<const Row> rows, const ClusterAssignment& assignment);

// One sub-table per cluster sharing the parent header, rows in original order.
// Row indices keep their parent positions.
std::vector<Table> cluster_subtables(const Table& table, const ClusterAssignment& assignment);

}  // namespace star
