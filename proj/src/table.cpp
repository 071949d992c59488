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

#include "star/table.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "star/error.hpp"

namespace star {

using nlohmann::json;

void validate_table(const Table& table) {
  if (table.id.empty()) throw SchemaError("table with empty id");
  if (table.header.empty()) throw SchemaError("table '" + table.id + "': empty header");
  std::set<std::size_t> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const Row& row = table.rows[r];
    if (row.cells.size() != table.header.size()) {
      throw SchemaError("table '" + table.id + "': row " + std::to_string(r) + " has " +
                        std::to_string(row.cells.size()) + " cells, header has " +
                        std::to_string(table.header.size()));
    }
    if (row.index >= table.rows.size() || !seen.insert(row.index).second) {
      throw SchemaError("table '" + table.id + "': invalid row index " + std::to_string(row.index));
    }
  }
}

void Corpus::add(Table table) {
  validate_table(table);
  if (by_id_.contains(table.id)) throw SchemaError("duplicate table id '" + table.id + "'");
  by_id_.emplace(table.id, tables_.size());
  tables_.push_back(std::move(table));
}

bool Corpus::contains(std::string_view id) const { return by_id_.find(id) != by_id_.end(); }

const Table& Corpus::at(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw InvalidArgumentError("unknown table id '" + std::string(id) + "'");
  return tables_[it->second];
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

// Calls fn(line_number, parsed_object) for every non-blank line.
template <typename Fn>
void for_each_json_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (!is_blank(line)) {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(line_no, e.what());
      }
      if (!obj.is_object()) throw ParseError(line_no, "record is not a JSON object");
      fn(line_no, obj);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
}

std::vector<std::string> string_array(const json& obj, const char* key, const std::string& who) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(who + ": missing field '" + key + "'");
  if (!it->is_array()) throw SchemaError(who + ": field '" + key + "' is not an array");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) throw SchemaError(who + ": field '" + key + "' has a non-string entry");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string required_string(const json& obj, const char* key, const std::string& who) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(who + ": missing field '" + key + "'");
  if (!it->is_string()) throw SchemaError(who + ": field '" + key + "' is not a string");
  return it->get<std::string>();
}

Table table_from_json(const json& obj, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  Table t;
  t.id = required_string(obj, "id", where);
  const std::string who = "table '" + t.id + "'";
  if (auto it = obj.find("title"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(who + ": field 'title' is not a string");
    t.title = it->get<std::string>();
  }
  if (auto it = obj.find("lang"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(who + ": field 'lang' is not a string");
    t.lang = it->get<std::string>();
  }
  t.header = string_array(obj, "header", who);
  auto rows = obj.find("rows");
  if (rows == obj.end()) throw SchemaError(who + ": missing field 'rows'");
  if (!rows->is_array()) throw SchemaError(who + ": field 'rows' is not an array");
  for (std::size_t r = 0; r < rows->size(); ++r) {
    const json& cells = (*rows)[r];
    if (!cells.is_array()) throw SchemaError(who + ": row " + std::to_string(r) + " is not an array");
    Row row;
    row.index = r;
    for (const auto& c : cells) {
      if (!c.is_string()) {
        throw SchemaError(who + ": row " + std::to_string(r) + " has a non-string cell");
      }
      row.cells.push_back(c.get<std::string>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json table_to_json(const Table& t) {
  json obj;
  obj["id"] = t.id;
  if (t.title) obj["title"] = *t.title;
  obj["lang"] = t.lang;
  obj["header"] = t.header;
  std::vector<const Row*> ordered;
  for (const auto& r : t.rows) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const Row* a, const Row* b) { return a->index < b->index; });
  json rows = json::array();
  for (const Row* r : ordered) rows.push_back(r->cells);
  obj["rows"] = std::move(rows);
  return obj;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void escape_into(std::string& out, std::string_view field, bool escape_colon) {
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\|"; break;
      case '\n': out += "\\n"; break;
      case ':':
        if (escape_colon) out += "\\:";
        else out += ':';
        break;
      default: out += c;
    }
  }
}

}  // namespace

Corpus parse_corpus_text(std::string_view text) {
  Corpus corpus;
  for_each_json_line(text, [&](std::size_t line_no, const json& obj) {
    corpus.add(table_from_json(obj, line_no));
  });
  return corpus;
}

Corpus parse_corpus(const std::filesystem::path& path) { return parse_corpus_text(read_file(path)); }

std::string write_corpus_text(const Corpus& corpus) {
  std::string out;
  for (const auto& t : corpus) {
    out += table_to_json(t).dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, write_corpus_text(corpus));
}

std::vector<EvalQuery> parse_queries_text(std::string_view text) {
  std::vector<EvalQuery> out;
  std::set<std::string> qids;
  for_each_json_line(text, [&](std::size_t line_no, const json& obj) {
    const std::string where = "line " + std::to_string(line_no);
    EvalQuery q;
    q.qid = required_string(obj, "qid", where);
    q.text = required_string(obj, "query", where);
    q.gold_ids = string_array(obj, "gold_table_ids", "query '" + q.qid + "'");
    if (q.gold_ids.empty()) throw SchemaError("query '" + q.qid + "': empty gold_table_ids");
    if (!qids.insert(q.qid).second) throw SchemaError("duplicate query id '" + q.qid + "'");
    std::sort(q.gold_ids.begin(), q.gold_ids.end());
    q.gold_ids.erase(std::unique(q.gold_ids.begin(), q.gold_ids.end()), q.gold_ids.end());
    out.push_back(std::move(q));
  });
  return out;
}

std::vector<EvalQuery> parse_queries(const std::filesystem::path& path) {
  return parse_queries_text(read_file(path));
}

std::string write_queries_text(const std::vector<EvalQuery>& queries) {
  std::string out;
  for (const auto& q : queries) {
    json obj;
    obj["qid"] = q.qid;
    obj["query"] = q.text;
    obj["gold_table_ids"] = q.gold_ids;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_row(std::span<const std::string> header, const Row& row) {
  if (header.size() != row.cells.size()) {
    throw ArityError("row " + std::to_string(row.index) + " has " +
                     std::to_string(row.cells.size()) + " cells, header has " +
                     std::to_string(header.size()));
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += " | ";
    escape_into(out, header[c], true);
    out += ": ";
    escape_into(out, row.cells[c], false);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_row_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string column;
  std::string value;
  bool in_value = false;
  auto flush = [&] {
    if (!in_value) throw InvalidArgumentError("row text field without ': ' separator");
    out.emplace_back(std::move(column), std::move(value));
    column.clear();
    value.clear();
    in_value = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    std::string& target = in_value ? value : column;
    if (c == '\\' && i + 1 < text.size()) {
      char next = text[++i];
      target += next == 'n' ? '\n' : next;
    } else if (!in_value && c == ':' && i + 1 < text.size() && text[i + 1] == ' ') {
      in_value = true;
      ++i;
    } else if (c == ' ' && text.substr(i, 3) == " | ") {
      flush();
      i += 2;
    } else {
      target += c;
    }
  }
  flush();
  return out;
}

std::string serialize_header(std::span<const std::string> header) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += " | ";
    escape_into(out, header[c], true);
  }
  return out;
}

std::string serialize_partial_table(std::span<const std::string> header, std::span<const Row> rows) {
  if (rows.empty()) throw EmptyError("partial table has no rows");
  std::vector<const Row*> ordered;
  ordered.reserve(rows.size());
  for (const auto& r : rows) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const Row* a, const Row* b) { return a->index < b->index; });
  std::string out = serialize_header(header);
  for (const Row* r : ordered) {
    out += '\n';
    out += serialize_row(header, *r);
  }
  return out;
}

}  // namespace star
