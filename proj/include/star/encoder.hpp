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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "star/embedding.hpp"
#include "star/http.hpp"

namespace star {

enum class EncoderBackend { kReference, kRemote };

const char* to_string(EncoderBackend backend);
EncoderBackend encoder_backend_from_string(std::string_view name);

struct EncoderConfig {
  EncoderBackend backend = EncoderBackend::kReference;
  // Reference backend: output dimension (>= 8). Remote backend: expected
  // dimension, or 0 to accept whatever the service reports first.
  std::size_t dim = 512;
  std::uint64_t hash_seed = 0;

  std::string endpoint;
  std::string auth_token;  // falls back to $STAR_EMBED_TOKEN
  std::size_t batch_size = 32;
  int timeout_ms = 30000;
  int max_attempts = 3;
  int backoff_ms = 250;
  std::size_t max_in_flight = 4;

  std::optional<std::filesystem::path> cache_path;

  void validate() const;
};

// Signed character-3-gram feature hashing, L2-normalized. Text is lowercased
// (ASCII) and split into Unicode code points; texts shorter than three code
// points contribute a single gram. Throws EmptyInputError on blank text.
EmbeddingVector reference_embed(std::string_view text, std::size_t dim, std::uint64_t seed = 0);

// Persistent, append-only embedding cache keyed by (backend id, dim, SHA-256 of text).
class EmbeddingCache {
 public:
  EmbeddingCache(std::string backend_id, std::optional<std::filesystem::path> path);

  std::optional<EmbeddingVector> find(std::string_view text, std::size_t dim) const;
  void store(std::string_view text, const EmbeddingVector& vec);
  std::size_t size() const;

 private:
  std::string key(std::string_view text, std::size_t dim) const;

  std::string backend_id_;
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mu_;
  std::map<std::string, EmbeddingVector> entries_;
};

// Encoder(·): every output is unit norm and shares one dimension.
// Safe for concurrent use.
class EncoderGateway {
 public:
  struct Stats {
    std::size_t cache_hits = 0;
    std::size_t backend_texts = 0;  // texts embedded by the backend
    std::size_t requests = 0;       // remote HTTP requests, including retries
  };

  explicit EncoderGateway(EncoderConfig config, std::shared_ptr<HttpTransport> transport = nullptr);

  EmbeddingVector encode(std::string_view text);
  std::vector<EmbeddingVector> encode_batch(std::span<const std::string> texts);

  // 0 until a remote backend has answered (unless configured).
  std::size_t dim() const { return dim_.load(); }
  std::string backend_id() const;
  const EncoderConfig& config() const { return config_; }
  Stats stats() const;

 private:
  std::vector<EmbeddingVector> remote_embed(std::span<const std::string> texts, std::size_t offset);
  void lock_dim(std::size_t dim);

  EncoderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::string token_;
  EmbeddingCache cache_;
  std::atomic<std::size_t> dim_{0};
  std::counting_semaphore<64> in_flight_;
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> backend_texts_{0};
  std::atomic<std::size_t> requests_{0};
};

}  // namespace star
