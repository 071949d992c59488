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

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <set>

#include "star/clustering.hpp"
#include "star/encoder.hpp"
#include "star/error.hpp"
#include "star/fusion.hpp"
#include "test_support.hpp"

namespace star {
namespace {

double sse_of_partition(const std::vector<Point>& pts, const std::vector<int>& side) {
  double total = 0;
  for (int s = 0; s < 2; ++s) {
    Point mean(pts[0].size(), 0.0);
    int n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (side[i] != s) continue;
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += pts[i][d];
      ++n;
    }
    if (n == 0) return std::numeric_limits<double>::infinity();
    for (double& v : mean) v /= n;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (side[i] != s) continue;
      for (std::size_t d = 0; d < mean.size(); ++d) total += (pts[i][d] - mean[d]) * (pts[i][d] - mean[d]);
    }
  }
  return total;
}

// Exhaustive search over all 2-partitions for the SSE-optimal one.
std::vector<int> best_two_partition(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  std::vector<int> best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<int> side(n);
    for (std::size_t i = 0; i < n; ++i) side[i] = (mask >> i) & 1;
    const double s = sse_of_partition(pts, side);
    if (s < best_sse) {
      best_sse = s;
      best = side;
    }
  }
  return best;
}

bool same_partition(const std::vector<std::size_t>& labels, const std::vector<int>& side) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if ((labels[i] == labels[j]) != (side[i] == side[j])) return false;
    }
  }
  return true;
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts(n, Point(dim));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  return pts;
}

std::vector<Row> rows_for(std::size_t n, std::size_t index_offset = 0) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(Row{{"r" + std::to_string(i)}, i + index_offset});
  return rows;
}

EmbeddingVector unit(std::vector<double> v) { return EmbeddingVector::normalized(std::move(v)); }

TEST(HeaderAware, ScalarExample) {
  const std::vector<EmbeddingVector> rows = {unit({0, 1, 0})};
  const auto out = header_aware_embeddings(unit({1, 0, 0}), rows, 0.2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0][0], 0.2);
  EXPECT_DOUBLE_EQ(out[0][1], 0.8);
  EXPECT_DOUBLE_EQ(out[0][2], 0.0);
}

TEST(HeaderAware, Limits) {
  std::mt19937_64 rng(5);
  const auto h = EmbeddingVector::from_unit(test::random_unit(rng, 16));
  std::vector<EmbeddingVector> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(EmbeddingVector::from_unit(test::random_unit(rng, 16)));
  const auto zero = header_aware_embeddings(h, rows, 0.0);
  const auto one = header_aware_embeddings(h, rows, 1.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(zero[i], Point(rows[i].values().begin(), rows[i].values().end()));
    EXPECT_EQ(one[i], Point(h.values().begin(), h.values().end()));
  }
}

TEST(HeaderAware, LinearityAndNoRenormalization) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = ua(rng);
    const auto h = test::random_unit(rng, 12);
    const auto r = test::random_unit(rng, 12);
    const std::vector<EmbeddingVector> rows = {EmbeddingVector::from_unit(r)};
    const auto out = header_aware_embeddings(EmbeddingVector::from_unit(h), rows, alpha);
    for (std::size_t d = 0; d < 12; ++d) EXPECT_NEAR(out[0][d], alpha * h[d] + (1 - alpha) * r[d], 1e-9);
  }
}

TEST(HeaderAware, Errors) {
  const std::vector<EmbeddingVector> rows = {unit({0, 1})};
  EXPECT_THROW(header_aware_embeddings(unit({1, 0, 0}), rows, 0.5), DimensionMismatchError);
  EXPECT_THROW(header_aware_embeddings(unit({1, 0}), rows, 1.5), InvalidArgumentError);
}

TEST(HeaderAware, HeaderWeightShrinksSpread) {
  std::mt19937_64 rng(8);
  auto max_pairwise = [](const std::vector<Point>& pts) {
    double m = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::max(m, squared_distance(pts[i], pts[j]));
    }
    return m;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = EmbeddingVector::from_unit(test::random_unit(rng, 8));
    std::vector<EmbeddingVector> rows;
    for (int i = 0; i < 6; ++i) rows.push_back(EmbeddingVector::from_unit(test::random_unit(rng, 8)));
    EXPECT_LT(max_pairwise(header_aware_embeddings(h, rows, 0.99)),
              max_pairwise(header_aware_embeddings(h, rows, 0.0)));
  }
}

TEST(KMeans, TwoTightGroupsMatchExhaustiveOptimum) {
  const std::vector<Point> pts = {{1, 0}, {0, 1}, {0.99, 0.01}, {0.01, 0.99}};
  const auto oracle = best_two_partition(pts);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = kmeans(pts, 2, seed);
    EXPECT_EQ(a.k_effective, 2u);
    EXPECT_TRUE(same_partition(a.labels, oracle));
    EXPECT_EQ(a.labels[0], a.labels[2]);
    EXPECT_EQ(a.labels[1], a.labels[3]);
  }
}

TEST(KMeans, WellSeparatedRandomGroupsMatchExhaustiveOptimum) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point> pts;
    const std::size_t n = 4 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      const double cx = (i % 2) ? 3.0 : -3.0;
      pts.push_back({cx + noise(rng), noise(rng), noise(rng)});
    }
    const auto a = kmeans(pts, 2, trial);
    EXPECT_TRUE(same_partition(a.labels, best_two_partition(pts)));
  }
}

TEST(KMeans, IdenticalPointsCollapse) {
  const std::vector<Point> pts(3, Point{0.3, 0.4});
  const auto a = kmeans(pts, 10, 1);
  EXPECT_EQ(a.k_effective, 1u);
  EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(a.members()[0].size(), 3u);
}

TEST(KMeans, DistinctPointRule) {
  const std::vector<Point> pts = {{0, 0}, {0, 0}, {1, 1}, {1, 1}, {2, 2}};
  EXPECT_EQ(kmeans(pts, 10, 3).k_effective, 3u);
  EXPECT_EQ(kmeans(pts, 2, 3).k_effective, 2u);
}

TEST(KMeans, SingleClusterIsMean) {
  std::mt19937_64 rng(3);
  const auto pts = random_points(rng, 17, 5);
  const auto a = kmeans(pts, 1, 9);
  for (std::size_t d = 0; d < 5; ++d) {
    double m = 0;
    for (const auto& p : pts) m += p[d];
    EXPECT_NEAR(a.centroids[0][d], m / pts.size(), 1e-6);
  }
}

TEST(KMeans, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const std::size_t dim = 1 + rng() % 8;
    const std::size_t k = 1 + rng() % 4;
    auto pts = random_points(rng, n, dim);
    if (trial % 5 == 0 && n > 2) pts[1] = pts[0];
    const auto a = kmeans(pts, k, trial);
    ASSERT_EQ(a.labels.size(), n);
    ASSERT_EQ(a.centroids.size(), a.k_effective);
    EXPECT_LE(a.k_effective, k);
    const auto members = a.members();
    for (std::size_t j = 0; j < a.k_effective; ++j) {
      ASSERT_FALSE(members[j].empty());
      for (std::size_t d = 0; d < dim; ++d) {
        double m = 0;
        for (auto i : members[j]) m += pts[i][d];
        EXPECT_NEAR(a.centroids[j][d], m / members[j].size(), 1e-6);
      }
    }
    if (a.converged) {
      for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : a.centroids) best = std::min(best, squared_distance(pts[i], c));
        EXPECT_LE(squared_distance(pts[i], a.centroids[a.labels[i]]), best + 1e-5);
      }
    }
    const auto again = kmeans(pts, k, trial);
    EXPECT_EQ(again.labels, a.labels);
    EXPECT_EQ(again.centroids, a.centroids);
  }
}

TEST(KMeans, EmptyInput) { EXPECT_THROW(kmeans(std::vector<Point>{}, 2, 0), EmptyError); }

TEST(SelectRepresentatives, Singleton) {
  const std::vector<Point> pts = {{5, 5}};
  const auto rows = rows_for(1, 3);
  const auto a = kmeans(pts, 1, 0);
  const auto p = select_representatives("t", pts, rows, a);
  ASSERT_EQ(p.representatives.size(), 1u);
  EXPECT_EQ(p.representatives[0].row.index, 3u);
}

TEST(SelectRepresentatives, ArgminAndTieRule) {
  ClusterAssignment a;
  a.k_effective = 1;
  a.labels = {0, 0, 0};
  a.centroids = {{0.0}};
  const std::vector<Point> pts = {{0.5}, {0.1}, {0.9}};
  EXPECT_EQ(select_representatives("t", pts, rows_for(3), a).representatives[0].row.index, 1u);

  const std::vector<Point> tied = {{0.9}, {-0.3}, {0.3}};
  std::vector<Row> rows = {Row{{"a"}, 8}, Row{{"b"}, 5}, Row{{"c"}, 2}};
  EXPECT_EQ(select_representatives("t", tied, rows, a).representatives[0].row.index, 2u);
}

TEST(SelectRepresentatives, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const auto pts = random_points(rng, n, 1 + rng() % 6);
    std::vector<Row> rows = rows_for(n);
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto a = kmeans(pts, 1 + rng() % 5, trial);
    const auto partial = select_representatives("t", pts, rows, a);
    ASSERT_EQ(partial.representatives.size(), a.k_effective);
    std::set<std::size_t> clusters;
    for (std::size_t r = 0; r < partial.representatives.size(); ++r) {
      const auto& rep = partial.representatives[r];
      if (r > 0) EXPECT_LT(partial.representatives[r - 1].row.index, rep.row.index);
      clusters.insert(rep.cluster);
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (a.labels[i] != rep.cluster) continue;
        const double d = squared_distance(pts[i], a.centroids[rep.cluster]);
        if (best == n) {
          best = i;
          continue;
        }
        const double bd = squared_distance(pts[best], a.centroids[rep.cluster]);
        if (d < bd || (d == bd && rows[i].index < rows[best].index)) best = i;
      }
      EXPECT_EQ(rep.row, rows[best]);
    }
    EXPECT_EQ(clusters.size(), a.k_effective);
  }
}

TEST(SelectRepresentatives, InconsistentAssignment) {
  const std::vector<Point> pts = {{0}, {1}};
  ClusterAssignment a;
  a.k_effective = 2;
  a.labels = {0, 0};
  a.centroids = {{0}, {1}};
  EXPECT_THROW(select_representatives("t", pts, rows_for(2), a), InconsistentAssignmentError);
  a.labels = {0, 1};
  EXPECT_THROW(select_representatives("t", pts, rows_for(3), a), InconsistentAssignmentError);
  a.labels = {0, 2};
  EXPECT_THROW(select_representatives("t", pts, rows_for(2), a), InconsistentAssignmentError);
}

Table table_with_rows(std::size_t n) {
  Table t;
  t.id = "parent";
  t.header = {"a", "b"};
  for (std::size_t i = 0; i < n; ++i) t.rows.push_back(Row{{"x" + std::to_string(i), "y"}, i});
  return t;
}

TEST(ClusterSubtables, SingleCluster) {
  const auto t = table_with_rows(4);
  ClusterAssignment a;
  a.k_effective = 1;
  a.labels = {0, 0, 0, 0};
  a.centroids = {{0}};
  const auto subs = cluster_subtables(t, a);
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(subs[0].rows, t.rows);
  EXPECT_EQ(subs[0].header, t.header);
}

TEST(ClusterSubtables, PartitionSizes) {
  const auto t = table_with_rows(10);
  ClusterAssignment a;
  a.k_effective = 3;
  a.labels = {0, 1, 0, 2, 0, 1, 0, 2, 1, 0};
  a.centroids = {{0}, {1}, {2}};
  const auto subs = cluster_subtables(t, a);
  ASSERT_EQ(subs.size(), 3u);
  EXPECT_EQ(subs[0].rows.size(), 5u);
  EXPECT_EQ(subs[1].rows.size(), 3u);
  EXPECT_EQ(subs[2].rows.size(), 2u);
  std::set<std::size_t> seen;
  for (const auto& s : subs) {
    EXPECT_EQ(s.header, t.header);
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      EXPECT_TRUE(seen.insert(s.rows[r].index).second);
      if (r > 0) EXPECT_LT(s.rows[r - 1].index, s.rows[r].index);
    }
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(PartialTable, DeterministicAndAblationAlphaZero) {
  Table t;
  t.id = "cities";
  t.header = {"city", "country"};
  const std::vector<std::pair<std::string, std::string>> data = {
      {"Paris", "France"}, {"Lyon", "France"},   {"Berlin", "Germany"}, {"Munich", "Germany"},
      {"Rome", "Italy"},   {"Milan", "Italy"},   {"Madrid", "Spain"},   {"Seville", "Spain"},
      {"Oslo", "Norway"},  {"Bergen", "Norway"}, {"Vienna", "Austria"}, {"Graz", "Austria"}};
  for (std::size_t i = 0; i < data.size(); ++i) t.rows.push_back(Row{{data[i].first, data[i].second}, i});
  EncoderGateway enc(EncoderConfig{});
  PipelineConfig cfg;
  cfg.clustering.k = 4;
  const auto p1 = build_partial_table(t, cfg, enc);
  const auto p2 = build_partial_table(t, cfg, enc);
  EXPECT_EQ(serialize_partial_table(t.header, p1.rows()), serialize_partial_table(t.header, p2.rows()));
  EXPECT_EQ(p1.representatives.size(), 4u);

  PipelineConfig ablated = cfg;
  ablated.flags.use_header = false;
  ClusterAssignment via_flag;
  build_partial_table(t, ablated, enc, &via_flag);
  PipelineConfig alpha_zero = cfg;
  alpha_zero.clustering.alpha = 0.0;
  ClusterAssignment via_alpha;
  build_partial_table(t, alpha_zero, enc, &via_alpha);

  std::vector<EmbeddingVector> row_vecs;
  for (const auto& r : t.rows) row_vecs.push_back(enc.encode(serialize_row(t.header, r)));
  const auto direct = kmeans(as_points(row_vecs), 4, cfg.clustering.seed);
  EXPECT_EQ(via_flag.labels, direct.labels);
  EXPECT_EQ(via_alpha.labels, direct.labels);
}

TEST(ClusteringConfig, Validation) {
  ClusteringConfig c;
  c.alpha = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgumentError);
  c.alpha = 0.5;
  c.k = 0;
  EXPECT_THROW(c.validate(), InvalidArgumentError);
}

}  // namespace
}  // namespace star
