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

#include "star/encoder.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/error.hpp"
#include "star/util.hpp"

namespace star {

using nlohmann::json;

const char* to_string(EncoderBackend backend) {
  return backend == EncoderBackend::kReference ? "reference" : "remote";
}

EncoderBackend encoder_backend_from_string(std::string_view name) {
  if (name == "reference") return EncoderBackend::kReference;
  if (name == "remote") return EncoderBackend::kRemote;
  throw InvalidArgumentError("unknown encoder backend '" + std::string(name) + "'");
}

void EncoderConfig::validate() const {
  if (backend == EncoderBackend::kReference && dim < 8) {
    throw InvalidArgumentError("reference encoder dim must be >= 8");
  }
  if (backend == EncoderBackend::kRemote && endpoint.empty()) {
    throw InvalidArgumentError("remote encoder requires an endpoint");
  }
  if (batch_size < 1) throw InvalidArgumentError("encoder batch size must be >= 1");
  if (max_in_flight < 1 || max_in_flight > 64) {
    throw InvalidArgumentError("encoder in-flight limit must be in [1, 64]");
  }
}

namespace {

// Decodes UTF-8 leniently: malformed bytes become standalone code units
// outside the Unicode range. ASCII letters are lowercased.
std::vector<std::uint32_t> code_points(std::string_view text) {
  std::vector<std::uint32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    const int extra = b < 0x80 ? 0
                      : (b & 0xE0) == 0xC0 ? 1
                      : (b & 0xF0) == 0xE0 ? 2
                      : (b & 0xF8) == 0xF0 ? 3
                                           : -1;
    bool ok = extra >= 0 && i + static_cast<std::size_t>(extra) < text.size();
    std::uint32_t cp = extra == 0 ? b : extra == 1 ? (b & 0x1F) : extra == 2 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; ok && k <= extra; ++k) {
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(0x110000u + b);
      ++i;
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::uint64_t hash_gram(std::span<const std::uint32_t> gram, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ splitmix64(seed);
  for (std::uint32_t cp : gram) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= (cp >> (8 * byte)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return splitmix64(h);
}

void add_gram(std::vector<double>& acc, std::span<const std::uint32_t> gram, std::uint64_t seed) {
  const std::uint64_t h = hash_gram(gram, seed);
  acc[h % acc.size()] += (h >> 63) ? -1.0 : 1.0;
}

}  // namespace

EmbeddingVector reference_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (trim(text).empty()) throw EmptyInputError();
  if (dim == 0) throw InvalidArgumentError("reference encoder dim must be positive");
  const auto cps = code_points(text);
  std::vector<double> acc(dim, 0.0);
  const std::span<const std::uint32_t> all(cps);
  if (cps.size() < 3) {
    add_gram(acc, all, seed);
  } else {
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) add_gram(acc, all.subspan(i, 3), seed);
  }
  if (l2_norm(acc) == 0.0) {
    // Every gram cancelled against a colliding opposite-signed gram.
    add_gram(acc, all, splitmix64(seed ^ 0x5354415255ULL));
  }
  return EmbeddingVector::normalized(std::move(acc));
}

EmbeddingCache::EmbeddingCache(std::string backend_id, std::optional<std::filesystem::path> path)
    : backend_id_(std::move(backend_id)), path_(std::move(path)) {
  if (!path_) return;
  std::ifstream in(*path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    // A torn trailing line from an interrupted run is skipped.
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) continue;
    if (rec.value("backend", "") != backend_id_) continue;
    try {
      auto values = rec.at("vector").get<std::vector<double>>();
      const std::string k = backend_id_ + "|" + std::to_string(values.size()) + "|" +
                            rec.at("sha256").get<std::string>();
      entries_.insert_or_assign(k, EmbeddingVector::from_unit(std::move(values)));
    } catch (const std::exception&) {
      continue;
    }
  }
}

std::string EmbeddingCache::key(std::string_view text, std::size_t dim) const {
  return backend_id_ + "|" + std::to_string(dim) + "|" + sha256_hex(text);
}

std::optional<EmbeddingVector> EmbeddingCache::find(std::string_view text, std::size_t dim) const {
  const std::string k = key(text, dim);
  std::lock_guard lock(mu_);
  auto it = entries_.find(k);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::store(std::string_view text, const EmbeddingVector& vec) {
  const std::string digest = sha256_hex(text);
  const std::string k = backend_id_ + "|" + std::to_string(vec.dim()) + "|" + digest;
  std::lock_guard lock(mu_);
  if (!entries_.emplace(k, vec).second) return;
  if (!path_) return;
  json rec;
  rec["backend"] = backend_id_;
  rec["dim"] = vec.dim();
  rec["sha256"] = digest;
  rec["vector"] = std::vector<double>(vec.values().begin(), vec.values().end());
  std::ofstream out(*path_, std::ios::app);
  if (!out) throw IoError("cannot append to cache '" + path_->string() + "'");
  out << rec.dump() << '\n';
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

namespace {

std::string make_backend_id(const EncoderConfig& c) {
  if (c.backend == EncoderBackend::kReference) {
    return "reference:seed=" + std::to_string(c.hash_seed);
  }
  return "remote:" + c.endpoint;
}

std::string resolve_token(const EncoderConfig& c) {
  if (!c.auth_token.empty()) return c.auth_token;
  if (const char* env = std::getenv("STAR_EMBED_TOKEN")) return env;
  return {};
}

}  // namespace

EncoderGateway::EncoderGateway(EncoderConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      token_(resolve_token(config_)),
      cache_(make_backend_id(config_), config_.cache_path),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 64))) {
  config_.validate();
  if (config_.backend == EncoderBackend::kReference || config_.dim > 0) dim_ = config_.dim;
  if (config_.backend == EncoderBackend::kRemote && !transport_) {
    transport_ = make_http_transport(config_.endpoint, std::chrono::milliseconds(config_.timeout_ms));
  }
}

std::string EncoderGateway::backend_id() const { return make_backend_id(config_); }

EncoderGateway::Stats EncoderGateway::stats() const {
  return {cache_hits_.load(), backend_texts_.load(), requests_.load()};
}

void EncoderGateway::lock_dim(std::size_t dim) {
  std::size_t expected = 0;
  if (dim_.compare_exchange_strong(expected, dim)) return;
  if (expected != dim) {
    throw DimensionMismatchError("encoder returned dimension " + std::to_string(dim) +
                                 ", expected " + std::to_string(expected));
  }
}

EmbeddingVector EncoderGateway::encode(std::string_view text) {
  const std::string owned(text);
  return std::move(encode_batch(std::span<const std::string>(&owned, 1)).front());
}

std::vector<EmbeddingVector> EncoderGateway::encode_batch(std::span<const std::string> texts) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (trim(texts[i]).empty()) throw EmptyInputError(i);
  }
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> misses;
  const std::size_t known_dim = dim_.load();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::optional<EmbeddingVector> hit;
    if (known_dim > 0) hit = cache_.find(texts[i], known_dim);
    if (hit) {
      out[i] = std::move(*hit);
      ++cache_hits_;
    } else {
      misses.push_back(i);
    }
  }
  if (misses.empty()) return out;

  if (config_.backend == EncoderBackend::kReference) {
    for (std::size_t i : misses) {
      out[i] = reference_embed(texts[i], config_.dim, config_.hash_seed);
      cache_.store(texts[i], out[i]);
    }
    backend_texts_ += misses.size();
    return out;
  }

  // Remote: chunk the misses and keep at most max_in_flight requests open.
  std::vector<std::string> pending;
  pending.reserve(misses.size());
  for (std::size_t i : misses) pending.push_back(texts[i]);
  const std::size_t batch = config_.batch_size;
  const std::size_t chunks = (pending.size() + batch - 1) / batch;
  std::vector<std::future<std::vector<EmbeddingVector>>> futures;
  futures.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * batch;
    const std::size_t len = std::min(batch, pending.size() - begin);
    futures.push_back(std::async(std::launch::async, [this, &pending, &misses, begin, len] {
      in_flight_.acquire();
      try {
        auto result = remote_embed(std::span<const std::string>(pending).subspan(begin, len),
                                   misses[begin]);
        in_flight_.release();
        return result;
      } catch (...) {
        in_flight_.release();
        throw;
      }
    }));
  }
  std::exception_ptr first_error;
  for (std::size_t c = 0; c < chunks; ++c) {
    try {
      auto vecs = futures[c].get();
      for (std::size_t j = 0; j < vecs.size(); ++j) {
        const std::size_t i = misses[c * batch + j];
        cache_.store(texts[i], vecs[j]);
        out[i] = std::move(vecs[j]);
      }
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  backend_texts_ += misses.size();
  return out;
}

std::vector<EmbeddingVector> EncoderGateway::remote_embed(std::span<const std::string> texts,
                                                          std::size_t offset) {
  json request;
  request["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  const std::string body = request.dump();
  HttpHeaders headers;
  if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);

  HttpResponse last;
  std::vector<EmbeddingVector> result;
  std::optional<DimensionMismatchError> dim_error;
  const bool ok = retry_with_backoff(
      config_.max_attempts, std::chrono::milliseconds(config_.backoff_ms), [&](int attempt) {
        ++requests_;
        last = transport_->post("/embed", body, headers);
        if (last.status != 200) {
          spdlog::warn("embed request (texts from index {}) attempt {} failed with status {}",
                       offset, attempt + 1, last.status);
          return false;
        }
        json parsed = json::parse(last.body, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("embeddings") ||
            !parsed["embeddings"].is_array()) {
          last.body = "malformed embed response: " + last.body.substr(0, 200);
          return false;
        }
        const auto& embs = parsed["embeddings"];
        if (embs.size() != texts.size()) {
          last.body = "expected " + std::to_string(texts.size()) + " embeddings, got " +
                      std::to_string(embs.size());
          return false;
        }
        const std::size_t reported =
            parsed.contains("dim") && parsed["dim"].is_number_unsigned() ? parsed["dim"].get<std::size_t>() : 0;
        std::vector<EmbeddingVector> vecs;
        vecs.reserve(embs.size());
        for (const auto& e : embs) {
          if (!e.is_array()) {
            last.body = "embedding entry is not an array";
            return false;
          }
          std::vector<double> values;
          values.reserve(e.size());
          for (const auto& x : e) {
            if (!x.is_number()) {
              last.body = "embedding entry has a non-numeric value";
              return false;
            }
            values.push_back(x.get<double>());
          }
          if ((reported != 0 && values.size() != reported) ||
              (config_.dim != 0 && values.size() != config_.dim)) {
            dim_error.emplace("remote returned dimension " + std::to_string(values.size()) +
                              " (reported " + std::to_string(reported) + ", configured " +
                              std::to_string(config_.dim) + ")");
            return true;
          }
          try {
            vecs.push_back(EmbeddingVector::normalized(std::move(values)));
          } catch (const Error& err) {
            last.body = std::string("unusable embedding: ") + err.what();
            return false;
          }
        }
        result = std::move(vecs);
        return true;
      });
  if (dim_error) throw *dim_error;
  if (!ok) {
    RemoteError err(last.status, last.body);
    err.add_context("texts from index " + std::to_string(offset));
    throw err;
  }
  if (!result.empty()) lock_dim(result.front().dim());
  return result;
}

}  // namespace star
