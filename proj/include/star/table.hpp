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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace star {

struct Row {
  std::vector<std::string> cells;
  std::size_t index = 0;  // zero-based position in the parent table

  bool operator==(const Row&) const = default;
};

struct Table {
  std::string id;
  std::optional<std::string> title;
  std::string lang = "en";
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::size_t arity() const { return header.size(); }
  bool operator==(const Table&) const = default;
};

// Validates id, header and row arity; throws SchemaError naming the table.
void validate_table(const Table& table);

// Insertion-ordered collection of tables with unique ids.
class Corpus {
 public:
  Corpus() = default;

  // Throws SchemaError on an invalid table or a duplicate id.
  void add(Table table);

  std::size_t size() const { return tables_.size(); }
  bool empty() const { return tables_.empty(); }
  bool contains(std::string_view id) const;
  const Table& at(std::string_view id) const;
  const std::vector<Table>& tables() const { return tables_; }

  auto begin() const { return tables_.begin(); }
  auto end() const { return tables_.end(); }

  bool operator==(const Corpus& other) const { return tables_ == other.tables_; }

 private:
  std::vector<Table> tables_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

struct EvalQuery {
  std::string qid;
  std::string text;
  std::vector<std::string> gold_ids;  // sorted, unique, nonempty

  bool operator==(const EvalQuery&) const = default;
};

// Corpus JSONL: {"id", "title"?, "lang"?, "header": [str], "rows": [[str]]} per line.
Corpus parse_corpus(const std::filesystem::path& path);
Corpus parse_corpus_text(std::string_view text);
std::string write_corpus_text(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Eval-query JSONL: {"qid", "query", "gold_table_ids": [str]} per line.
std::vector<EvalQuery> parse_queries(const std::filesystem::path& path);
std::vector<EvalQuery> parse_queries_text(std::string_view text);
std::string write_queries_text(const std::vector<EvalQuery>& queries);

// "col1: v1 | col2: v2". Backslash, '|' and newline are escaped in every
// field; ':' is additionally escaped inside column names.
std::string serialize_row(std::span<const std::string> header, const Row& row);

// Inverse of serialize_row: (column, value) pairs.
std::vector<std::pair<std::string, std::string>> parse_row_text(std::string_view text);

// Header line, then one serialize_row line per row in ascending original index.
std::string serialize_partial_table(std::span<const std::string> header, std::span<const Row> rows);

// The header line used by serialize_partial_table; also the text encoded as e_H.
std::string serialize_header(std::span<const std::string> header);

}  // namespace star
