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

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "star/evaluation.hpp"

namespace star::test {

// Hand-computed hit-based recall from stored representations.
inline Recall oracle_recall(const Dataset& ds, const std::vector<TableRepresentation>& reps) {
  EncoderGateway enc(EncoderConfig{});
  std::array<double, 3> hit{};
  for (const auto& q : ds.queries) {
    const auto qv = enc.encode(q.text);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& rep : reps) {
      double s = 0.0;
      for (std::size_t d = 0; d < qv.dim(); ++d) s += qv[d] * static_cast<double>(static_cast<float>(rep.e_t[d]));
      scored.emplace_back(s, rep.table_id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::size_t rank = 0;
    for (std::size_t i = 0; i < scored.size() && rank == 0; ++i) {
      if (std::count(q.gold_ids.begin(), q.gold_ids.end(), scored[i].second)) rank = i + 1;
    }
    const std::size_t ks[3] = {1, 5, 10};
    for (int k = 0; k < 3; ++k) hit[k] += (rank >= 1 && rank <= ks[k]) ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(ds.queries.size());
  return {hit[0] / n, hit[1] / n, hit[2] / n};
}

inline Dataset random_fixture(std::mt19937_64& rng, int id) {
  static const std::vector<std::string> words = {
      "river", "mountain", "piano", "violin", "carbon", "oxygen", "falcon", "eagle",  "copper", "silver",
      "tokyo", "lima",     "oslo",  "cairo",  "tennis", "rugby",  "maple",  "cedar",  "comet",  "nebula",
      "bread", "cheese",   "train", "ferry",  "winter", "summer", "ruby",   "python", "opera",  "ballet"};
  auto w = [&] { return words[rng() % words.size()]; };
  Dataset ds;
  ds.name = "rand" + std::to_string(id);
  const std::size_t n_tables = 2 + rng() % 14;
  for (std::size_t t = 0; t < n_tables; ++t) {
    Table tab;
    tab.id = "t" + std::to_string(t);
    const std::size_t cols = 1 + rng() % 3;
    for (std::size_t c = 0; c < cols; ++c) tab.header.push_back(w() + std::to_string(c));
    const std::size_t rows = 1 + rng() % 12;
    for (std::size_t r = 0; r < rows; ++r) {
      Row row{{}, r};
      for (std::size_t c = 0; c < cols; ++c) row.cells.push_back(w() + " " + w());
      tab.rows.push_back(std::move(row));
    }
    ds.corpus.add(std::move(tab));
  }
  const std::size_t n_queries = 1 + rng() % 10;
  for (std::size_t q = 0; q < n_queries; ++q) {
    EvalQuery eq;
    eq.qid = "q" + std::to_string(q);
    eq.text = "which " + w() + " has " + w() + " " + w();
    eq.gold_ids.push_back("t" + std::to_string(rng() % n_tables));
    if (rng() % 4 == 0) eq.gold_ids.push_back("t" + std::to_string(rng() % n_tables));
    std::sort(eq.gold_ids.begin(), eq.gold_ids.end());
    eq.gold_ids.erase(std::unique(eq.gold_ids.begin(), eq.gold_ids.end()), eq.gold_ids.end());
    ds.queries.push_back(std::move(eq));
  }
  return ds;
}

}  // namespace star::test
