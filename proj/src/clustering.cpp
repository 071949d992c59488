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

#include "star/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "star/error.hpp"

namespace star {

void ClusteringConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgumentError("alpha must be in [0, 1]");
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  if (max_iters < 1) throw InvalidArgumentError("max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgumentError("tol must be positive");
}

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(k_effective);
  for (std::size_t i = 0; i < labels.size(); ++i) out.at(labels[i]).push_back(i);
  return out;
}

std::vector<Row> PartialTable::rows() const {
  std::vector<Row> out;
  out.reserve(representatives.size());
  for (const auto& r : representatives) out.push_back(r.row);
  return out;
}

std::vector<Point> header_aware_embeddings(const EmbeddingVector& e_header,
                                           std::span<const EmbeddingVector> e_rows, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgumentError("alpha must be in [0, 1]");
  const double row_weight = 1.0 - alpha;
  std::vector<Point> out;
  out.reserve(e_rows.size());
  for (const auto& r : e_rows) {
    require_same_dim(e_header.dim(), r.dim(), "header-aware embedding");
    Point p(r.dim());
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = alpha * e_header[d] + row_weight * r[d];
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Point> as_points(std::span<const EmbeddingVector> vectors) {
  std::vector<Point> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.emplace_back(v.values().begin(), v.values().end());
  return out;
}

namespace {

// Portable uniform double in [0, 1) from the engine's raw output.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t count_distinct(std::span<const Point> points) {
  std::vector<const Point*> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) { return *a < *b; });
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || *sorted[i] != *sorted[i - 1]) ++distinct;
  }
  return distinct;
}

std::vector<Point> kmeanspp_init(std::span<const Point> points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centers;
  centers.reserve(k);
  centers.push_back(points[std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform01(rng) * n))]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += d2[i];
        if (d2[i] > 0.0 && cumulative > target) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target at the very end of the mass.
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick == n) break;  // unreachable while k <= distinct points
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], points[pick]));
  }
  return centers;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared_distance(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Moves the point farthest from its centroid (among clusters with >= 2
// members) into each empty cluster.
void repair_empty_clusters(std::span<const Point> points, std::vector<std::size_t>& labels,
                           std::vector<Point>& centers) {
  const std::size_t k = centers.size();
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[labels[i]] < 2) continue;
      const double d = squared_distance(points[i], centers[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) break;
    --sizes[labels[far]];
    labels[far] = j;
    sizes[j] = 1;
    centers[j] = points[far];
  }
}

std::vector<Point> cluster_means(std::span<const Point> points, const std::vector<std::size_t>& labels,
                                 std::size_t k) {
  const std::size_t dim = points.front().size();
  std::vector<Point> sums(k, Point(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = sums[labels[i]];
    for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
    ++counts[labels[i]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (double& v : sums[j]) v /= static_cast<double>(counts[j]);
  }
  return sums;
}

}  // namespace

ClusterAssignment kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iters, double tol) {
  if (points.empty()) throw EmptyError("k-means needs at least one point");
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) require_same_dim(dim, p.size(), "k-means input");

  ClusterAssignment result;
  result.k_effective = std::min(k, count_distinct(points));
  std::mt19937_64 rng(seed);
  std::vector<Point> centers = kmeanspp_init(points, result.k_effective, rng);
  result.k_effective = centers.size();

  std::vector<std::size_t> labels(points.size(), 0);
  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, max_iters); ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest(points[i], centers);
    repair_empty_clusters(points, labels, centers);
    std::vector<Point> means = cluster_means(points, labels, centers.size());
    double movement = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      movement = std::max(movement, std::sqrt(squared_distance(centers[j], means[j])));
    }
    centers = std::move(means);
    result.iterations = iter + 1;
    if (movement < tol) {
      result.converged = true;
      break;
    }
  }
  result.labels = std::move(labels);
  result.centroids = std::move(centers);
  return result;
}

namespace {

void check_assignment(std::span<const Point> points, const ClusterAssignment& a) {
  if (a.labels.size() != points.size()) {
    throw InconsistentAssignmentError("assignment has " + std::to_string(a.labels.size()) +
                                      " labels for " + std::to_string(points.size()) + " points");
  }
  if (a.centroids.size() != a.k_effective) {
    throw InconsistentAssignmentError("assignment has " + std::to_string(a.centroids.size()) +
                                      " centroids for k_effective " + std::to_string(a.k_effective));
  }
  std::vector<bool> used(a.k_effective, false);
  for (auto l : a.labels) {
    if (l >= a.k_effective) throw InconsistentAssignmentError("label out of range");
    used[l] = true;
  }
  for (std::size_t j = 0; j < a.k_effective; ++j) {
    if (!used[j]) throw InconsistentAssignmentError("cluster " + std::to_string(j) + " is empty");
    if (!points.empty() && a.centroids[j].size() != points.front().size()) {
      throw InconsistentAssignmentError("centroid dimension differs from point dimension");
    }
  }
}

}  // namespace

PartialTable select_representatives(const std::string& table_id, std::span<const Point> points,
                                    std::span<const Row> rows, const ClusterAssignment& assignment) {
  if (points.size() != rows.size()) {
    throw InconsistentAssignmentError(std::to_string(points.size()) + " points for " +
                                      std::to_string(rows.size()) + " rows");
  }
  check_assignment(points, assignment);
  const std::size_t none = rows.size();
  std::vector<std::size_t> best(assignment.k_effective, none);
  std::vector<double> best_d(assignment.k_effective, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = assignment.labels[i];
    const double d = squared_distance(points[i], assignment.centroids[j]);
    if (best[j] == none || d < best_d[j] ||
        (d == best_d[j] && rows[i].index < rows[best[j]].index)) {
      best[j] = i;
      best_d[j] = d;
    }
  }
  PartialTable partial;
  partial.table_id = table_id;
  for (std::size_t j = 0; j < best.size(); ++j) partial.representatives.push_back({rows[best[j]], j});
  std::sort(partial.representatives.begin(), partial.representatives.end(),
            [](const Representative& a, const Representative& b) { return a.row.index < b.row.index; });
  return partial;
}

std::vector<Table> cluster_subtables(const Table& table, const ClusterAssignment& assignment) {
  if (assignment.labels.size() != table.rows.size()) {
    throw InconsistentAssignmentError("assignment does not cover every row of '" + table.id + "'");
  }
  std::vector<Table> subs(assignment.k_effective);
  for (std::size_t j = 0; j < subs.size(); ++j) {
    subs[j].id = table.id + "#c" + std::to_string(j);
    subs[j].title = table.title;
    subs[j].lang = table.lang;
    subs[j].header = table.header;
  }
  std::vector<std::size_t> order(table.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.rows[a].index < table.rows[b].index;
  });
  for (std::size_t i : order) subs.at(assignment.labels[i]).rows.push_back(table.rows[i]);
  return subs;
}

}  // namespace star
