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

/* C interface to the STAR table-retrieval library.
 *
 * All functions return a star_status. On failure a thread-local message is
 * available from star_last_error(). Strings returned through char** out
 * parameters are owned by the caller and released with star_string_free().
 */
#ifndef STAR_STAR_H_
#define STAR_STAR_H_

#include <stddef.h>

#if defined(_WIN32)
#  define STAR_API __declspec(dllexport)
#else
#  define STAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum star_status {
  STAR_OK = 0,
  STAR_E_INVALID_ARGUMENT = 1,
  STAR_E_PARSE = 2,
  STAR_E_SCHEMA = 3,
  STAR_E_ARITY = 4,
  STAR_E_EMPTY = 5,
  STAR_E_EMPTY_INPUT = 6,
  STAR_E_REMOTE = 7,
  STAR_E_DIMENSION_MISMATCH = 8,
  STAR_E_INCONSISTENT_ASSIGNMENT = 9,
  STAR_E_DEGENERATE_FUSION = 10,
  STAR_E_DUPLICATE_ID = 11,
  STAR_E_FINGERPRINT_MISMATCH = 12,
  STAR_E_EMPTY_INDEX = 13,
  STAR_E_IO = 14,
  STAR_E_VERSION = 15,
  STAR_E_CORRUPT_INDEX = 16,
  STAR_E_MISSING_GOLD = 17,
  STAR_E_GENERATION = 18,
  STAR_E_INTERNAL = 100
} star_status;

typedef enum star_report_kind {
  STAR_REPORT_EVAL = 0,
  STAR_REPORT_SWEEP = 1,
  STAR_REPORT_ABLATION = 2
} star_report_kind;

typedef struct star_context star_context;
typedef struct star_index star_index;

typedef struct star_represent_stats {
  size_t tables;
  size_t computed;
  size_t skipped;
  size_t failed;
  size_t cache_hits;
  size_t backend_texts;
} star_represent_stats;

STAR_API const char* star_version(void);
STAR_API const char* star_last_error(void);
STAR_API const char* star_status_string(star_status status);
STAR_API void star_string_free(char* s);

/* config_json: run configuration (seed, encoder, generation, clustering,
 * fusion, variant, sweep, datasets, dry_run). NULL or "" selects defaults. */
STAR_API star_status star_context_create(const char* config_json, star_context** out);
STAR_API void star_context_destroy(star_context* ctx);
/* Effective configuration, fingerprint and backend ids as JSON. */
STAR_API star_status star_context_info(const star_context* ctx, char** out_json);
/* Request counts and protocol violations seen by the dry-run mock; error when
 * the context was not created with dry_run. */
STAR_API star_status star_context_dry_run_summary(const star_context* ctx, char** out_json);

/* Validates a corpus file and returns a JSON summary (tables, rows, langs). */
STAR_API star_status star_ingest(const char* corpus_path, char** out_json);

/* Builds or resumes the representation archive for a corpus. Per-table
 * failures are counted in stats and listed in out_failures_json (nullable);
 * the call itself still returns STAR_OK. */
STAR_API star_status star_represent(star_context* ctx, const char* corpus_path, const char* archive_path,
                                    star_represent_stats* stats, char** out_failures_json);

/* Writes an index file from an archive; every record must match the
 * context's fingerprint. */
STAR_API star_status star_index_build(star_context* ctx, const char* archive_path, const char* index_path,
                                      size_t* out_count);

STAR_API star_status star_index_open(const char* index_path, star_index** out);
STAR_API void star_index_close(star_index* index);
STAR_API size_t star_index_size(const star_index* index);
STAR_API size_t star_index_dim(const star_index* index);
/* Borrowed pointer, valid until star_index_close. */
STAR_API const char* star_index_fingerprint(const star_index* index);

/* Encodes query_text with the context's encoder and returns the top-k hits
 * as JSON lines: {"rank":1,"table_id":"...","score":0.93}. */
STAR_API star_status star_search(star_context* ctx, const star_index* index, const char* query_text, size_t k,
                                 char** out_jsonl);

/* Runs the evaluation harness over the configured datasets. out_text may be
 * NULL. *out_any_failed is set to 1 when at least one variant failed. */
STAR_API star_status star_run_report(star_context* ctx, star_report_kind kind, char** out_json, char** out_text,
                                     int* out_any_failed);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* STAR_STAR_H_ */
