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

#include "star/index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "star/error.hpp"
#include "star/fusion.hpp"
#include "star/util.hpp"

namespace star {

namespace {

constexpr char kMagic[8] = {'S', 'T', 'A', 'R', 'I', 'D', 'X', '\0'};

}  // namespace

bool hit_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.table_id < b.table_id;
}

Index::Index(std::size_t dim, std::string fingerprint, std::int64_t created_unix)
    : dim_(dim), fingerprint_(std::move(fingerprint)), created_unix_(created_unix) {
  if (dim_ == 0) throw InvalidArgumentError("index dimension must be positive");
}

void Index::add(const TableRepresentation& rep) { add(rep.table_id, rep.e_t, rep.fingerprint); }

void Index::add(const std::string& table_id, const EmbeddingVector& vec, const std::string& fingerprint) {
  if (vec.dim() != dim_) {
    throw DimensionMismatchError("entry '" + table_id + "' has dimension " + std::to_string(vec.dim()) +
                                 ", index has " + std::to_string(dim_));
  }
  if (fingerprint != fingerprint_) {
    throw FingerprintMismatchError("entry '" + table_id + "' was built with a different configuration");
  }
  if (id_set_.contains(table_id)) throw DuplicateIdError("table id '" + table_id + "' already indexed");
  id_set_.insert(table_id);
  ids_.push_back(table_id);
  for (double v : vec.values()) data_.push_back(static_cast<float>(v));
}

SearchResult Index::search(const EmbeddingVector& query, std::size_t k, std::size_t threads) const {
  if (ids_.empty()) throw EmptyIndexError("search on an empty index");
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  require_same_dim(query.dim(), dim_, "index search");
  const auto q = query.values();
  const std::size_t n = ids_.size();
  const std::size_t shards = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::vector<SearchHit>> partial(shards);
  parallel_for(shards, shards, [&](std::size_t s) {
    const std::size_t begin = n * s / shards;
    const std::size_t end = n * (s + 1) / shards;
    auto& hits = partial[s];
    hits.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const float* v = data_.data() + i * dim_;
      double score = 0.0;
      for (std::size_t d = 0; d < dim_; ++d) score += q[d] * static_cast<double>(v[d]);
      hits.push_back({ids_[i], score});
    }
    const std::size_t keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + keep, hits.end(), hit_before);
    hits.resize(keep);
  });
  SearchResult result;
  for (auto& shard : partial) {
    std::move(shard.begin(), shard.end(), std::back_inserter(result.hits));
  }
  const std::size_t keep = std::min(k, result.hits.size());
  std::partial_sort(result.hits.begin(), result.hits.begin() + keep, result.hits.end(), hit_before);
  result.hits.resize(keep);
  return result;
}

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    out.insert(out.end(), c, c + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
  }
  void f32(float f) { le(std::bit_cast<std::uint32_t>(f)); }

  std::vector<unsigned char> out;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> data) : data_(data) {}

  std::span<const unsigned char> take(std::size_t n) {
    if (n > data_.size() - pos_) throw CorruptIndexError("index file is truncated");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T le() {
    auto s = take(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(s[i]) << (8 * i);
    return static_cast<T>(u);
  }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const unsigned char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> serialize_index(const Index& index) {
  Writer records;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& id = index.ids()[i];
    records.le(static_cast<std::uint32_t>(id.size()));
    records.bytes(id.data(), id.size());
    for (float f : index.vector(i)) records.f32(f);
  }
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.le(Index::kFormatVersion);
  w.le(static_cast<std::uint32_t>(index.dim()));
  w.le(static_cast<std::uint64_t>(index.size()));
  if (index.fingerprint().size() > 0xFFFF) throw InvalidArgumentError("fingerprint too long");
  w.le(static_cast<std::uint16_t>(index.fingerprint().size()));
  w.bytes(index.fingerprint().data(), index.fingerprint().size());
  w.le(static_cast<std::int64_t>(index.created_unix()));
  w.le(crc32(records.out));
  w.bytes(records.out.data(), records.out.size());
  return std::move(w.out);
}

Index deserialize_index(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  auto magic = r.take(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) throw CorruptIndexError("bad index magic");
  const auto version = r.le<std::uint32_t>();
  if (version != Index::kFormatVersion) {
    throw VersionError("index format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(Index::kFormatVersion) + ")");
  }
  const auto dim = r.le<std::uint32_t>();
  const auto count = r.le<std::uint64_t>();
  const auto fp_len = r.le<std::uint16_t>();
  auto fp = r.take(fp_len);
  const auto created = r.le<std::int64_t>();
  const auto expected_crc = r.le<std::uint32_t>();
  if (crc32(bytes.subspan(r.pos())) != expected_crc) throw CorruptIndexError("index checksum mismatch");
  if (dim == 0) throw CorruptIndexError("index dimension is zero");

  Index index(dim, std::string(fp.begin(), fp.end()), created);
  std::vector<double> values(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto id_len = r.le<std::uint32_t>();
    auto id = r.take(id_len);
    for (auto& v : values) v = r.f32();
    // Float-rounded unit vectors stay within the unit-norm tolerance.
    index.add(std::string(id.begin(), id.end()), EmbeddingVector::from_unit(values), index.fingerprint());
  }
  if (r.remaining() != 0) throw CorruptIndexError("trailing bytes after index records");
  return index;
}

void persist(const Index& index, const std::filesystem::path& path) {
  const auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write index '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for index '" + path.string() + "'");
}

Index load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

}  // namespace star
