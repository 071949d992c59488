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

#include "adversarial.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace star::test {
namespace {

// Ten vocabularies with little character overlap between them.
const std::vector<std::vector<std::string>> kVocab = {
    {"granite", "basalt", "quartz", "obsidian", "marble", "slate"},
    {"violin", "cello", "oboe", "bassoon", "harp", "clarinet"},
    {"falcon", "heron", "pelican", "sparrow", "kestrel", "osprey"},
    {"mango", "papaya", "kiwi", "lychee", "guava", "plum"},
    {"tugboat", "schooner", "kayak", "ferry", "yacht", "dinghy"},
    {"nitrogen", "helium", "xenon", "argon", "krypton", "neon"},
    {"judo", "fencing", "rowing", "squash", "hockey", "bowling"},
    {"tundra", "savanna", "steppe", "jungle", "fjord", "bayou"},
    {"cobalt", "zinc", "bismuth", "tungsten", "lithium", "gallium"},
    {"waltz", "tango", "polka", "samba", "mambo", "rumba"}};

std::string pseudo_word(std::mt19937_64& rng) {
  static const std::string consonants = "bdfgklmnprstvz";
  static const std::string vowels = "aeiou";
  std::string w;
  for (int i = 0; i < 4; ++i) {
    w += consonants[rng() % consonants.size()];
    w += vowels[rng() % vowels.size()];
  }
  return w;
}

}  // namespace

AdversarialCorpus make_adversarial(const AdversarialShape& shape) {
  if (shape.groups > static_cast<int>(kVocab.size()) || shape.rows % shape.groups != 0 ||
      shape.head_rows > (shape.rows / shape.groups) * shape.head_groups) {
    throw std::invalid_argument("unsupported adversarial shape");
  }
  std::mt19937_64 rng(shape.seed);
  AdversarialCorpus out;
  out.dataset.name = "adversarial";
  std::set<std::string> used;
  const int per_group = shape.rows / shape.groups;

  for (int t = 0; t < shape.tables; ++t) {
    std::vector<std::string> names(shape.groups);
    for (auto& n : names) {
      do n = pseudo_word(rng);
      while (!used.insert(n).second);
    }
    std::vector<int> order(shape.groups);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    // Head groups fill the opening rows; their remaining rows and all other
    // groups are interleaved after them.
    std::vector<int> groups;
    for (int h = 0; h < shape.head_groups; ++h) groups.insert(groups.end(), per_group, order[h]);
    std::vector<int> tail(groups.begin() + shape.head_rows, groups.end());
    groups.resize(shape.head_rows);
    for (int g = shape.head_groups; g < shape.groups; ++g) tail.insert(tail.end(), per_group, order[g]);
    std::shuffle(tail.begin(), tail.end(), rng);
    groups.insert(groups.end(), tail.begin(), tail.end());

    Table table;
    table.id = "adv" + std::string(t < 10 ? "0" : "") + std::to_string(t);
    table.title = "synthetic inventory " + std::to_string(t);
    table.header = {"Name", "Kind", "Detail"};
    std::vector<int> seen(shape.groups, 0);
    for (int r = 0; r < shape.rows; ++r) {
      const int g = groups[r];
      const auto& vocab = kVocab[g];
      const int n = seen[g]++;
      table.rows.push_back(Row{{names[g] + " " + std::to_string(n + 1), vocab[n % vocab.size()],
                                vocab[(n + 3) % vocab.size()] + " " + vocab[(n + 4) % vocab.size()]},
                               static_cast<std::size_t>(r)});
    }
    out.row_groups[table.id] = groups;

    for (int q = 0; q < shape.queries_per_table; ++q) {
      const int g = order[shape.head_groups + q];
      EvalQuery eq;
      eq.qid = table.id + "_q" + std::to_string(q);
      eq.text = "which " + names[g] + " is listed with " + kVocab[g][static_cast<std::size_t>(q) % kVocab[g].size()];
      eq.gold_ids = {table.id};
      out.dataset.queries.push_back(std::move(eq));
    }
    out.dataset.corpus.add(std::move(table));
  }
  return out;
}

}  // namespace star::test
