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

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "star/star.h"
#include "test_support.hpp"

namespace {

using nlohmann::json;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { star_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string toy(const char* file) { return (star::test::source_dir() / "data/toy" / file).string(); }

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_NE(std::string(star_version()), "");
  EXPECT_STREQ(star_status_string(STAR_OK), "ok");
  EXPECT_NE(std::string(star_status_string(STAR_E_CORRUPT_INDEX)), "");
}

TEST(CApi, ContextRejectsBadConfig) {
  star_context* ctx = nullptr;
  EXPECT_EQ(star_context_create("{\"bogus\": 1}", &ctx), STAR_E_INVALID_ARGUMENT);
  EXPECT_EQ(ctx, nullptr);
  EXPECT_NE(std::string(star_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(star_context_create("{not json", &ctx), STAR_E_INVALID_ARGUMENT);
  EXPECT_EQ(star_context_create(nullptr, nullptr), STAR_E_INVALID_ARGUMENT);
}

TEST(CApi, DefaultContextInfo) {
  star_context* ctx = nullptr;
  ASSERT_EQ(star_context_create(nullptr, &ctx), STAR_OK);
  OwnedString info;
  ASSERT_EQ(star_context_info(ctx, &info.p), STAR_OK);
  const auto j = json::parse(info.str());
  EXPECT_TRUE(j.contains("fingerprint"));
  OwnedString summary;
  EXPECT_NE(star_context_dry_run_summary(ctx, &summary.p), STAR_OK);
  star_context_destroy(ctx);
}

TEST(CApi, IngestReportsErrors) {
  OwnedString out;
  ASSERT_EQ(star_ingest(toy("corpus.jsonl").c_str(), &out.p), STAR_OK);
  EXPECT_EQ(json::parse(out.str())["tables"], 20);
  star::test::TempDir dir;
  const auto bad = dir.path() / "bad.jsonl";
  star::test::write_file(bad, "{\"id\": \"a\", \"header\": [\"x\"], \"rows\": [[\"1\", \"2\"]]}\n");
  OwnedString none;
  EXPECT_EQ(star_ingest(bad.string().c_str(), &none.p), STAR_E_SCHEMA);
  EXPECT_EQ(none.p, nullptr);
  EXPECT_NE(std::string(star_last_error()).find("'a'"), std::string::npos);
  EXPECT_EQ(star_ingest((dir.path() / "missing").string().c_str(), &none.p), STAR_E_IO);
}

TEST(CApi, RepresentIndexSearch) {
  star::test::TempDir dir;
  const auto archive = (dir.path() / "reps.jsonl").string();
  const auto index_path = (dir.path() / "toy.star").string();
  star_context* ctx = nullptr;
  ASSERT_EQ(star_context_create("{\"seed\": 7}", &ctx), STAR_OK);

  star_represent_stats stats{};
  OwnedString failures;
  ASSERT_EQ(star_represent(ctx, toy("corpus.jsonl").c_str(), archive.c_str(), &stats, &failures.p), STAR_OK);
  EXPECT_EQ(stats.tables, 20u);
  EXPECT_EQ(stats.computed, 20u);
  EXPECT_EQ(stats.failed, 0u);
  star_represent_stats again{};
  ASSERT_EQ(star_represent(ctx, toy("corpus.jsonl").c_str(), archive.c_str(), &again, nullptr), STAR_OK);
  EXPECT_EQ(again.skipped, 20u);

  size_t count = 0;
  ASSERT_EQ(star_index_build(ctx, archive.c_str(), index_path.c_str(), &count), STAR_OK);
  EXPECT_EQ(count, 20u);

  star_index* index = nullptr;
  ASSERT_EQ(star_index_open(index_path.c_str(), &index), STAR_OK);
  EXPECT_EQ(star_index_size(index), 20u);
  EXPECT_EQ(star_index_dim(index), 512u);
  OwnedString info;
  ASSERT_EQ(star_context_info(ctx, &info.p), STAR_OK);
  EXPECT_EQ(json::parse(info.str())["fingerprint"].get<std::string>(), star_index_fingerprint(index));

  OwnedString hits;
  ASSERT_EQ(star_search(ctx, index, "dog breeds and their origin", 3, &hits.p), STAR_OK);
  std::istringstream lines(hits.str());
  std::string line;
  int rank = 0;
  double prev = 2.0;
  while (std::getline(lines, line)) {
    const auto hit = json::parse(line);
    EXPECT_EQ(hit["rank"], ++rank);
    EXPECT_LE(hit["score"].get<double>(), prev);
    prev = hit["score"].get<double>();
  }
  EXPECT_EQ(rank, 3);

  OwnedString empty;
  EXPECT_EQ(star_search(ctx, index, "   ", 3, &empty.p), STAR_E_EMPTY_INPUT);

  star_index_close(index);
  star_context_destroy(ctx);
}

TEST(CApi, IndexRejectsForeignFingerprint) {
  star::test::TempDir dir;
  const auto archive = (dir.path() / "reps.jsonl").string();
  star_context* a = nullptr;
  star_context* b = nullptr;
  ASSERT_EQ(star_context_create("{\"seed\": 7}", &a), STAR_OK);
  ASSERT_EQ(star_context_create("{\"seed\": 7, \"fusion\": {\"beta\": 0.8}}", &b), STAR_OK);
  ASSERT_EQ(star_represent(a, toy("corpus.jsonl").c_str(), archive.c_str(), nullptr, nullptr), STAR_OK);
  size_t count = 0;
  EXPECT_EQ(star_index_build(b, archive.c_str(), (dir.path() / "x.star").string().c_str(), &count),
            STAR_E_FINGERPRINT_MISMATCH);
  star_context_destroy(a);
  star_context_destroy(b);
}

TEST(CApi, OpenReportsIndexErrors) {
  star::test::TempDir dir;
  star_index* index = nullptr;
  EXPECT_EQ(star_index_open((dir.path() / "nope.star").string().c_str(), &index), STAR_E_IO);
  const auto junk = dir.path() / "junk.star";
  star::test::write_file(junk, "not an index at all, just text");
  EXPECT_EQ(star_index_open(junk.string().c_str(), &index), STAR_E_CORRUPT_INDEX);
  EXPECT_EQ(index, nullptr);
}

TEST(CApi, RunReportWithoutDatasetsFails) {
  star_context* ctx = nullptr;
  ASSERT_EQ(star_context_create(nullptr, &ctx), STAR_OK);
  OwnedString out;
  int failed = 0;
  EXPECT_EQ(star_run_report(ctx, STAR_REPORT_EVAL, &out.p, nullptr, &failed), STAR_E_INVALID_ARGUMENT);
  star_context_destroy(ctx);
}

TEST(CApi, RunEvalReport) {
  const json cfg = {{"seed", 7},
                    {"datasets", json::array({{{"name", "toy"},
                                               {"corpus", toy("corpus.jsonl")},
                                               {"queries", toy("queries.jsonl")}}})}};
  star_context* ctx = nullptr;
  ASSERT_EQ(star_context_create(cfg.dump().c_str(), &ctx), STAR_OK);
  OwnedString out, text;
  int failed = -1;
  ASSERT_EQ(star_run_report(ctx, STAR_REPORT_EVAL, &out.p, &text.p, &failed), STAR_OK);
  EXPECT_EQ(failed, 0);
  EXPECT_FALSE(json::parse(out.str()).empty());
  EXPECT_NE(text.str().find("toy"), std::string::npos);
  star_context_destroy(ctx);
}

}  // namespace
