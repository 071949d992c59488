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
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "star/embedding.hpp"

namespace star {

struct TableRepresentation;

struct SearchHit {
  std::string table_id;
  double score = 0.0;

  bool operator==(const SearchHit&) const = default;
};

struct SearchResult {
  std::vector<SearchHit> hits;  // score descending, ties by table id ascending
  std::string query;
};

// Exact cosine index over unit vectors stored as 32-bit floats.
class Index {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  Index(std::size_t dim, std::string fingerprint, std::int64_t created_unix = 0);

  void add(const TableRepresentation& rep);
  void add(const std::string& table_id, const EmbeddingVector& vec, const std::string& fingerprint);

  // Brute-force top-k by dot product. Shards the scan across `threads` workers;
  // the result does not depend on the thread count.
  SearchResult search(const EmbeddingVector& query, std::size_t k, std::size_t threads = 1) const;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::int64_t created_unix() const { return created_unix_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> vector(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }

  bool operator==(const Index& other) const = default;

 private:
  std::size_t dim_;
  std::string fingerprint_;
  std::int64_t created_unix_;
  std::vector<std::string> ids_;
  std::set<std::string> id_set_;
  std::vector<float> data_;
};

// Ranking order shared by the index and its oracles.
bool hit_before(const SearchHit& a, const SearchHit& b);

// Layout (little-endian): "STARIDX\0", u32 version, u32 dim, u64 count,
// u16 fingerprint length + bytes, i64 created, u32 CRC-32 of the record
// region; then per record u32 id length, id bytes, dim x f32.
void persist(const Index& index, const std::filesystem::path& path);
Index load(const std::filesystem::path& path);

std::vector<unsigned char> serialize_index(const Index& index);
Index deserialize_index(std::span<const unsigned char> bytes);

}  // namespace star
