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

#include "star/config.hpp"
#include "star/error.hpp"

namespace star {
namespace {

using nlohmann::json;

TEST(RunConfig, Defaults) {
  const auto c = run_config_from_json(json::object());
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.pipeline.clustering.alpha, 0.2);
  EXPECT_EQ(c.pipeline.clustering.k, 10u);
  EXPECT_EQ(c.pipeline.fusion.beta, 0.5);
  EXPECT_EQ(c.pipeline.fusion.strategy, FusionStrategy::kDynamic);
  EXPECT_EQ(c.encoder.backend, EncoderBackend::kReference);
  EXPECT_EQ(c.generation.backend, GenBackend::kTemplate);
  EXPECT_EQ(c.lambdas.size(), 9u);
  EXPECT_TRUE(c.sweep_dwf);
}

TEST(RunConfig, ReadsEverySection) {
  const auto j = json::parse(R"({
    "seed": 7, "parallelism": 2, "log_level": "info",
    "encoder": {"backend": "remote", "endpoint": "http://emb:8080", "token": "t", "batch_size": 16,
                "max_attempts": 5, "backoff_ms": 100, "max_in_flight": 2, "cache": "c.jsonl"},
    "generation": {"backend": "remote", "api": "openai", "endpoint": "http://llm", "model": "m",
                   "temperature": 0.7, "retries": 1, "lang": "fr", "fallback": false},
    "clustering": {"alpha": 0.3, "k": 5},
    "fusion": {"strategy": "fixed", "lambda": 0.6, "beta": 0.4},
    "variant": {"scqg": false},
    "sweep": {"lambdas": [0.2, 0.4], "dwf": false},
    "datasets": [{"name": "d", "corpus": "c.jsonl", "queries": "q.jsonl"}]
  })");
  const auto c = run_config_from_json(j);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.pipeline.clustering.seed, 7u);
  EXPECT_EQ(c.encoder.backend, EncoderBackend::kRemote);
  EXPECT_EQ(c.encoder.dim, 0u);  // remote without a pinned dim
  EXPECT_EQ(c.encoder.batch_size, 16u);
  EXPECT_EQ(c.encoder.cache_path.value(), "c.jsonl");
  EXPECT_EQ(c.generation.api, GenApi::kOpenAiChat);
  EXPECT_EQ(c.generation.lang.value(), "fr");
  EXPECT_FALSE(c.generation.fallback);
  EXPECT_EQ(c.pipeline.clustering.k, 5u);
  EXPECT_EQ(c.pipeline.fusion.strategy, FusionStrategy::kFixed);
  EXPECT_EQ(c.pipeline.fusion.lambda, 0.6);
  EXPECT_FALSE(c.pipeline.flags.use_scqg);
  EXPECT_EQ(c.lambdas, (std::vector<double>{0.2, 0.4}));
  EXPECT_FALSE(c.sweep_dwf);
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].queries.value(), "q.jsonl");
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(run_config_from_json(json::parse(R"({"sead": 1})")), InvalidArgumentError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"clustering": {"alfa": 0.1}})")), InvalidArgumentError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"clustering": {"alpha": 2}})")), InvalidArgumentError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"fusion": {"strategy": "median"}})")), InvalidArgumentError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"clustering": {"k": "ten"}})")), InvalidArgumentError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"encoder": {"backend": "remote"}})")), InvalidArgumentError);
}

TEST(RunConfig, JsonRoundTrip) {
  auto c = run_config_from_json(json::parse(R"({"seed": 3, "fusion": {"lambda": 0.1}})"));
  const auto again = run_config_from_json(run_config_to_json(c));
  EXPECT_EQ(run_config_to_json(again), run_config_to_json(c));
}

}  // namespace
}  // namespace star
