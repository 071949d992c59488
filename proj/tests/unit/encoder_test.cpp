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

#include <cstdlib>
#include <random>
#include <set>

#include "fake_transport.hpp"
#include "star/embedding.hpp"
#include "star/encoder.hpp"
#include "star/error.hpp"
#include "test_support.hpp"

namespace star {
namespace {

using test::FakeTransport;

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) { return dot(a.values(), b.values()); }

EncoderConfig remote_config(std::size_t batch = 32) {
  EncoderConfig c;
  c.backend = EncoderBackend::kRemote;
  c.endpoint = "http://unused.invalid";
  c.dim = 64;
  c.batch_size = batch;
  c.backoff_ms = 0;
  return c;
}

// Independent character 3-gram enumeration over bytes (inputs are ASCII).
std::set<std::string> grams(const std::string& s) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) out.insert(s.substr(i, 3));
  return out;
}

TEST(ReferenceEmbed, DeterministicAndUnit) {
  EncoderGateway g(EncoderConfig{});
  for (const std::string t : {"population of france", "a", "ab", "Zürich 東京", "x | y: z"}) {
    const auto a = g.encode(t);
    const auto b = g.encode(t);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.dim(), 512u);
    EXPECT_NEAR(l2_norm(a.values()), 1.0, 1e-6);
  }
}

TEST(ReferenceEmbed, EmptyRejected) {
  EncoderGateway g(EncoderConfig{});
  EXPECT_THROW(g.encode(""), EmptyInputError);
  EXPECT_THROW(g.encode("   "), EmptyInputError);
  EXPECT_THROW(reference_embed("", 64), EmptyInputError);
}

TEST(ReferenceEmbed, SingleGramIsOneSignedBucket) {
  const auto v = reference_embed("abc", 128);
  int nonzero = 0;
  for (double x : v.values()) {
    if (x != 0.0) {
      ++nonzero;
      EXPECT_EQ(std::abs(x), 1.0);
    }
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(ReferenceEmbed, CaseInsensitiveAscii) {
  EXPECT_EQ(reference_embed("Population Of FRANCE", 256), reference_embed("population of france", 256));
}

TEST(ReferenceEmbed, LexicalOverlapRaisesSimilarity) {
  const auto a = reference_embed("population of france", 512);
  const auto b = reference_embed("population of spain", 512);
  const auto c = reference_embed("zx qq ww", 512);
  EXPECT_GT(cosine(a, b), cosine(a, c));
}

TEST(ReferenceEmbed, DisjointGramsNearOrthogonal) {
  std::mt19937_64 rng(2024);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  auto random_word = [&] {
    std::string s;
    for (int i = 0; i < 6; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  int pairs = 0;
  int near_zero = 0;
  bool first_checked = false;
  while (pairs < 200) {
    const auto a = random_word();
    const auto b = random_word();
    const auto ga = grams(a);
    const auto gb = grams(b);
    bool disjoint = true;
    for (const auto& g : ga) disjoint = disjoint && !gb.contains(g);
    if (!disjoint) continue;
    ++pairs;
    const double c = std::abs(cosine(reference_embed(a, 512), reference_embed(b, 512)));
    if (!first_checked) {
      EXPECT_LT(c, 0.05) << a << " vs " << b;
      first_checked = true;
    }
    if (c < 0.05) ++near_zero;
  }
  EXPECT_GE(near_zero, 180);
}

TEST(ReferenceEmbed, SeedChangesVectors) {
  EXPECT_NE(reference_embed("hello world", 64, 0), reference_embed("hello world", 64, 1));
  EXPECT_EQ(reference_embed("hello world", 64, 3), reference_embed("hello world", 64, 3));
}

TEST(EncoderConfig, Validation) {
  EncoderConfig c;
  c.dim = 7;
  EXPECT_THROW(EncoderGateway{c}, InvalidArgumentError);
  c.dim = 8;
  c.batch_size = 0;
  EXPECT_THROW(EncoderGateway{c}, InvalidArgumentError);
  EncoderConfig r;
  r.backend = EncoderBackend::kRemote;
  EXPECT_THROW(EncoderGateway{r}, InvalidArgumentError);
}

TEST(EncodeBatch, MatchesSingleEncode) {
  EncoderGateway g(EncoderConfig{});
  const std::vector<std::string> texts = {"alpha beta", "gamma delta", "alpha beta"};
  const auto batch = g.encode_batch(texts);
  ASSERT_EQ(batch.size(), 3u);
  EncoderGateway fresh(EncoderConfig{});
  for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(batch[i], fresh.encode(texts[i]));
}

TEST(EncodeBatch, EmptyStringNamesIndex) {
  EncoderGateway g(EncoderConfig{});
  const std::vector<std::string> texts = {"ok", "fine", "", "later"};
  try {
    g.encode_batch(texts);
    FAIL();
  } catch (const EmptyInputError& e) {
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 2u);
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
  }
}

TEST(RemoteEncoder, ChunksAndPreservesOrder) {
  auto t = std::make_shared<FakeTransport>([](const FakeTransport::Request& r) {
    return test::reference_embed_response(r, 64);
  });
  EncoderGateway g(remote_config(32), t);
  std::vector<std::string> texts;
  for (int i = 0; i < 1000; ++i) texts.push_back("text number " + std::to_string(i));
  const auto out = g.encode_batch(texts);
  const auto reqs = t->requests();
  ASSERT_EQ(reqs.size(), 32u);
  std::multiset<std::size_t> sizes;
  std::set<std::string> seen;
  for (const auto& r : reqs) {
    EXPECT_EQ(r.path, "/embed");
    sizes.insert(r.body["texts"].size());
    for (const auto& x : r.body["texts"]) seen.insert(x.get<std::string>());
  }
  EXPECT_EQ(sizes.count(32), 31u);
  EXPECT_EQ(sizes.count(8), 1u);
  EXPECT_EQ(seen.size(), 1000u);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_NEAR(cosine(out[i], reference_embed(texts[i], 64)), 1.0, 1e-12) << i;
  }
}

TEST(RemoteEncoder, BoundsInFlightRequests) {
  auto t = std::make_shared<FakeTransport>([](const FakeTransport::Request& r) {
    return test::reference_embed_response(r, 64);
  });
  t->set_delay(std::chrono::milliseconds(20));
  auto cfg = remote_config(1);
  cfg.max_in_flight = 3;
  EncoderGateway g(cfg, t);
  std::vector<std::string> texts;
  for (int i = 0; i < 12; ++i) texts.push_back("t" + std::to_string(i));
  g.encode_batch(texts);
  EXPECT_LE(t->max_active(), 3);
  EXPECT_GE(t->max_active(), 2);
}

TEST(RemoteEncoder, RetriesThenSucceeds) {
  std::atomic<int> calls{0};
  auto t = std::make_shared<FakeTransport>([&](const FakeTransport::Request& r) {
    if (++calls < 3) return HttpResponse{503, "busy"};
    return test::reference_embed_response(r, 64);
  });
  EncoderGateway g(remote_config(), t);
  g.encode("hello");
  EXPECT_EQ(calls.load(), 3);
  EXPECT_EQ(g.stats().requests, 3u);
}

TEST(RemoteEncoder, ExhaustedRetriesRaiseRemoteError) {
  auto t = std::make_shared<FakeTransport>([](const FakeTransport::Request&) { return HttpResponse{500, "boom"}; });
  EncoderGateway g(remote_config(), t);
  try {
    g.encode("hello");
    FAIL();
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.body(), "boom");
  }
  EXPECT_EQ(t->requests().size(), 3u);
}

TEST(RemoteEncoder, WrongDimensionRejected) {
  auto t = std::make_shared<FakeTransport>([](const FakeTransport::Request& r) {
    return test::reference_embed_response(r, 32);
  });
  EncoderGateway g(remote_config(), t);
  EXPECT_THROW(g.encode("hello"), DimensionMismatchError);
}

TEST(RemoteEncoder, UnpinnedDimensionLocksOnFirstAnswer) {
  std::atomic<int> calls{0};
  auto t = std::make_shared<FakeTransport>([&](const FakeTransport::Request& r) {
    return test::reference_embed_response(r, ++calls == 1 ? 48 : 40);
  });
  auto cfg = remote_config();
  cfg.dim = 0;
  EncoderGateway g(cfg, t);
  EXPECT_EQ(g.encode("one").dim(), 48u);
  EXPECT_EQ(g.dim(), 48u);
  EXPECT_THROW(g.encode("two"), DimensionMismatchError);
}

TEST(RemoteEncoder, BearerTokenFromEnvironment) {
  ::setenv("STAR_EMBED_TOKEN", "secret-123", 1);
  auto t = std::make_shared<FakeTransport>([](const FakeTransport::Request& r) {
    return test::reference_embed_response(r, 64);
  });
  EncoderGateway g(remote_config(), t);
  g.encode("hi");
  ::unsetenv("STAR_EMBED_TOKEN");
  const auto reqs = t->requests();
  ASSERT_EQ(reqs.size(), 1u);
  bool found = false;
  for (const auto& [k, v] : reqs[0].headers) found = found || (k == "Authorization" && v == "Bearer secret-123");
  EXPECT_TRUE(found);
}

TEST(EmbeddingCache, TransparentAndPersistent) {
  test::TempDir dir;
  EncoderConfig cfg;
  cfg.dim = 64;
  cfg.cache_path = dir.path() / "cache.jsonl";
  const std::vector<std::string> texts = {"north", "south", "east", "west"};
  std::vector<EmbeddingVector> first;
  {
    EncoderGateway g(cfg);
    first = g.encode_batch(texts);
    EXPECT_EQ(g.stats().backend_texts, 4u);
  }
  EncoderGateway again(cfg);
  const auto second = again.encode_batch(texts);
  EXPECT_EQ(second, first);
  EXPECT_EQ(again.stats().cache_hits, 4u);
  EXPECT_EQ(again.stats().backend_texts, 0u);

  EncoderConfig nocache;
  nocache.dim = 64;
  EXPECT_EQ(EncoderGateway(nocache).encode_batch(texts), first);
}

TEST(EmbeddingCache, TornLineIgnored) {
  test::TempDir dir;
  EncoderConfig cfg;
  cfg.dim = 16;
  cfg.cache_path = dir.path() / "cache.jsonl";
  {
    EncoderGateway g(cfg);
    g.encode("kept");
  }
  {
    std::ofstream out(*cfg.cache_path, std::ios::app);
    out << "{\"backend\":\"reference:seed=0\",\"dim\":16,\"sha";
  }
  EncoderGateway g(cfg);
  g.encode("kept");
  EXPECT_EQ(g.stats().cache_hits, 1u);
}

TEST(EncoderGateway, ConcurrentCallsAgree) {
  EncoderGateway g(EncoderConfig{});
  std::vector<std::string> texts;
  for (int i = 0; i < 64; ++i) texts.push_back("concurrent text " + std::to_string(i % 16));
  std::vector<std::vector<EmbeddingVector>> results(8);
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < 8; ++w) threads.emplace_back([&, w] { results[w] = g.encode_batch(texts); });
  }
  for (int w = 1; w < 8; ++w) EXPECT_EQ(results[w], results[0]);
}

TEST(RetryWithBackoff, ExponentialDelays) {
  const auto start = std::chrono::steady_clock::now();
  int attempts = 0;
  const bool ok = retry_with_backoff(3, std::chrono::milliseconds(10), [&](int) {
    ++attempts;
    return false;
  });
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_FALSE(ok);
  EXPECT_EQ(attempts, 3);
  EXPECT_GE(elapsed, std::chrono::milliseconds(30));
}

}  // namespace
}  // namespace star
