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

#include "star/star.h"

#include <cstdlib>
#include <cstring>
#include <memory>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "star/archive.hpp"
#include "star/config.hpp"
#include "star/dryrun.hpp"
#include "star/error.hpp"
#include "star/evaluation.hpp"
#include "star/index.hpp"
#include "star/table.hpp"
#include "star/version.hpp"

using nlohmann::json;

struct star_context {
  star::RunConfig config;
  std::unique_ptr<star::DryRunServer> dry_run;
  std::unique_ptr<star::EncoderGateway> encoder;
  std::unique_ptr<star::QueryGenerator> generator;
};

struct star_index {
  star::Index index;
};

namespace {

thread_local std::string g_last_error;

star_status status_of(star::ErrorKind kind) {
  using star::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return STAR_E_INVALID_ARGUMENT;
    case ErrorKind::kParse: return STAR_E_PARSE;
    case ErrorKind::kSchema: return STAR_E_SCHEMA;
    case ErrorKind::kArity: return STAR_E_ARITY;
    case ErrorKind::kEmpty: return STAR_E_EMPTY;
    case ErrorKind::kEmptyInput: return STAR_E_EMPTY_INPUT;
    case ErrorKind::kRemote: return STAR_E_REMOTE;
    case ErrorKind::kDimensionMismatch: return STAR_E_DIMENSION_MISMATCH;
    case ErrorKind::kInconsistentAssignment: return STAR_E_INCONSISTENT_ASSIGNMENT;
    case ErrorKind::kDegenerateFusion: return STAR_E_DEGENERATE_FUSION;
    case ErrorKind::kDuplicateId: return STAR_E_DUPLICATE_ID;
    case ErrorKind::kFingerprintMismatch: return STAR_E_FINGERPRINT_MISMATCH;
    case ErrorKind::kEmptyIndex: return STAR_E_EMPTY_INDEX;
    case ErrorKind::kIo: return STAR_E_IO;
    case ErrorKind::kVersion: return STAR_E_VERSION;
    case ErrorKind::kCorruptIndex: return STAR_E_CORRUPT_INDEX;
    case ErrorKind::kMissingGold: return STAR_E_MISSING_GOLD;
    case ErrorKind::kGeneration: return STAR_E_GENERATION;
  }
  return STAR_E_INTERNAL;
}

template <typename Fn>
star_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return STAR_OK;
  } catch (const star::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return STAR_E_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STAR_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return STAR_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) throw star::InvalidArgumentError(what);
}

std::string base_fingerprint(const star_context& ctx) {
  return star::config_fingerprint(ctx.config.pipeline.clustering, ctx.config.pipeline.fusion,
                                  ctx.generator->config(), ctx.encoder->config(), ctx.config.pipeline.flags);
}

std::optional<std::string> env_or(const std::string& configured, const char* env) {
  if (!configured.empty()) return configured;
  if (const char* v = std::getenv(env)) return std::string(v);
  return std::nullopt;
}

std::string configured_variant_name(const star::PipelineConfig& p) {
  const auto& f = p.flags;
  if (f.use_scqg && f.use_wf && f.use_header) {
    switch (p.fusion.strategy) {
      case star::FusionStrategy::kDynamic: return "STAR w/ DWF";
      case star::FusionStrategy::kFixed: return star::star_fixed(p, p.fusion.lambda).name;
      case star::FusionStrategy::kConcat: return "STAR w/ concat";
    }
  }
  return "custom (scqg=" + std::to_string(f.use_scqg) + ", wf=" + std::to_string(f.use_wf) +
         ", header=" + std::to_string(f.use_header) + ")";
}

std::vector<star::Dataset> load_datasets(const star::RunConfig& config) {
  if (config.datasets.empty()) throw star::InvalidArgumentError("no datasets configured");
  std::vector<star::Dataset> out;
  for (const auto& spec : config.datasets) {
    if (!spec.queries) throw star::InvalidArgumentError("dataset '" + spec.name + "' has no queries file");
    if (!std::filesystem::exists(*spec.queries)) {
      throw star::IoError("queries file not found: " + spec.queries->string());
    }
    if (!std::filesystem::exists(spec.corpus)) throw star::IoError("corpus file not found: " + spec.corpus.string());
    out.push_back({spec.name, star::parse_corpus(spec.corpus), star::parse_queries(*spec.queries)});
  }
  return out;
}

}  // namespace

extern "C" {

const char* star_version(void) { return star::kVersion; }

const char* star_last_error(void) { return g_last_error.c_str(); }

const char* star_status_string(star_status status) {
  switch (status) {
    case STAR_OK: return "ok";
    case STAR_E_INVALID_ARGUMENT: return "invalid argument";
    case STAR_E_PARSE: return "parse error";
    case STAR_E_SCHEMA: return "schema error";
    case STAR_E_ARITY: return "arity error";
    case STAR_E_EMPTY: return "empty input";
    case STAR_E_EMPTY_INPUT: return "empty text";
    case STAR_E_REMOTE: return "remote error";
    case STAR_E_DIMENSION_MISMATCH: return "dimension mismatch";
    case STAR_E_INCONSISTENT_ASSIGNMENT: return "inconsistent assignment";
    case STAR_E_DEGENERATE_FUSION: return "degenerate fusion";
    case STAR_E_DUPLICATE_ID: return "duplicate id";
    case STAR_E_FINGERPRINT_MISMATCH: return "fingerprint mismatch";
    case STAR_E_EMPTY_INDEX: return "empty index";
    case STAR_E_IO: return "i/o error";
    case STAR_E_VERSION: return "unsupported version";
    case STAR_E_CORRUPT_INDEX: return "corrupt index";
    case STAR_E_MISSING_GOLD: return "missing gold table";
    case STAR_E_GENERATION: return "generation error";
    case STAR_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void star_string_free(char* s) { std::free(s); }

star_status star_context_create(const char* config_json, star_context** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = nullptr;
    json j = json::object();
    if (config_json && *config_json) j = json::parse(config_json);
    auto ctx = std::make_unique<star_context>();
    ctx->config = star::run_config_from_json(j);
    const auto level = spdlog::level::from_str(ctx->config.log_level);
    spdlog::set_level(level);
    auto& cfg = ctx->config;
    if (cfg.dry_run) {
      star::DryRunServer::Options opts;
      opts.dim = cfg.encoder.dim > 0 ? cfg.encoder.dim : 512;
      opts.hash_seed = cfg.encoder.hash_seed;
      opts.embed_token = env_or(cfg.encoder.auth_token, "STAR_EMBED_TOKEN");
      opts.llm_token = env_or(cfg.generation.auth_token, "STAR_LLM_TOKEN");
      ctx->dry_run = std::make_unique<star::DryRunServer>(opts);
      cfg.encoder.backend = star::EncoderBackend::kRemote;
      cfg.encoder.endpoint = ctx->dry_run->base_url();
      cfg.encoder.dim = opts.dim;
      cfg.encoder.backoff_ms = 0;
      cfg.generation.backend = star::GenBackend::kRemote;
      cfg.generation.endpoint = ctx->dry_run->base_url();
      cfg.generation.backoff_ms = 0;
    }
    ctx->encoder = std::make_unique<star::EncoderGateway>(cfg.encoder);
    ctx->generator = std::make_unique<star::QueryGenerator>(cfg.generation);
    *out = ctx.release();
  });
}

void star_context_destroy(star_context* ctx) { delete ctx; }

star_status star_context_info(const star_context* ctx, char** out_json) {
  return guarded([&] {
    require(ctx && out_json, "null argument");
    json info;
    info["version"] = star::kVersion;
    info["config"] = star::run_config_to_json(ctx->config);
    info["fingerprint"] = base_fingerprint(*ctx);
    info["encoder_backend"] = ctx->encoder->backend_id();
    info["generation_backend"] = star::to_string(ctx->generator->config().backend);
    if (ctx->dry_run) info["dry_run_url"] = ctx->dry_run->base_url();
    *out_json = dup_string(info.dump(2));
  });
}

star_status star_context_dry_run_summary(const star_context* ctx, char** out_json) {
  return guarded([&] {
    require(ctx && out_json, "null argument");
    if (!ctx->dry_run) throw star::InvalidArgumentError("context was not created in dry-run mode");
    *out_json = dup_string(ctx->dry_run->summary_json().dump(2));
  });
}

star_status star_ingest(const char* corpus_path, char** out_json) {
  return guarded([&] {
    require(corpus_path && out_json, "null argument");
    const auto corpus = star::parse_corpus(corpus_path);
    std::size_t rows = 0;
    std::size_t max_rows = 0;
    std::map<std::string, std::size_t> langs;
    for (const auto& t : corpus) {
      rows += t.rows.size();
      max_rows = std::max(max_rows, t.rows.size());
      ++langs[t.lang];
    }
    json summary = {{"tables", corpus.size()}, {"rows", rows}, {"max_rows", max_rows}, {"langs", langs}};
    *out_json = dup_string(summary.dump());
  });
}

star_status star_represent(star_context* ctx, const char* corpus_path, const char* archive_path,
                           star_represent_stats* stats, char** out_failures_json) {
  return guarded([&] {
    require(ctx && corpus_path && archive_path, "null argument");
    const auto corpus = star::parse_corpus(corpus_path);
    const auto before = ctx->encoder->stats();
    const auto result = star::represent_corpus(corpus, archive_path, ctx->config.pipeline, *ctx->generator,
                                               *ctx->encoder, ctx->config.parallelism);
    const auto after = ctx->encoder->stats();
    if (stats) {
      stats->tables = result.tables;
      stats->computed = result.computed;
      stats->skipped = result.skipped;
      stats->failed = result.failed;
      stats->cache_hits = after.cache_hits - before.cache_hits;
      stats->backend_texts = after.backend_texts - before.backend_texts;
    }
    if (out_failures_json) *out_failures_json = dup_string(json(result.failures).dump());
  });
}

star_status star_index_build(star_context* ctx, const char* archive_path, const char* index_path,
                             size_t* out_count) {
  return guarded([&] {
    require(ctx && archive_path && index_path, "null argument");
    const auto reps = star::read_archive(archive_path);
    if (reps.empty()) throw star::EmptyError("archive '" + std::string(archive_path) + "' has no records");
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    star::Index index(reps.front().e_t.dim(), base_fingerprint(*ctx), now);
    for (const auto& rep : reps) index.add(rep);
    star::persist(index, index_path);
    if (out_count) *out_count = index.size();
  });
}

star_status star_index_open(const char* index_path, star_index** out) {
  return guarded([&] {
    require(index_path && out, "null argument");
    *out = nullptr;
    *out = new star_index{star::load(index_path)};
  });
}

void star_index_close(star_index* index) { delete index; }

size_t star_index_size(const star_index* index) { return index ? index->index.size() : 0; }

size_t star_index_dim(const star_index* index) { return index ? index->index.dim() : 0; }

const char* star_index_fingerprint(const star_index* index) {
  return index ? index->index.fingerprint().c_str() : "";
}

star_status star_search(star_context* ctx, const star_index* index, const char* query_text, size_t k,
                        char** out_jsonl) {
  return guarded([&] {
    require(ctx && index && query_text && out_jsonl, "null argument");
    // Query vectors are only comparable under the configuration that built the index.
    if (base_fingerprint(*ctx) != index->index.fingerprint()) {
      throw star::FingerprintMismatchError("index was built with a different configuration than this context");
    }
    const auto vec = ctx->encoder->encode(query_text);
    auto result = index->index.search(vec, k, ctx->config.parallelism);
    std::string out;
    for (std::size_t i = 0; i < result.hits.size(); ++i) {
      json line = {{"rank", i + 1}, {"table_id", result.hits[i].table_id}, {"score", result.hits[i].score}};
      out += line.dump() + "\n";
    }
    *out_jsonl = dup_string(out);
  });
}

star_status star_run_report(star_context* ctx, star_report_kind kind, char** out_json, char** out_text,
                            int* out_any_failed) {
  return guarded([&] {
    require(ctx && out_json, "null argument");
    const auto datasets = load_datasets(ctx->config);
    star::EvalContext ectx{*ctx->encoder, *ctx->generator, ctx->config.parallelism};
    const auto& base = ctx->config.pipeline;
    star::EvalReport report;
    switch (kind) {
      case STAR_REPORT_EVAL:
        report = star::run_eval(datasets, star::MethodVariant{configured_variant_name(base), base}, ectx);
        break;
      case STAR_REPORT_SWEEP:
        report = star::run_sweep(datasets, base, ctx->config.lambdas, ctx->config.sweep_dwf, ectx);
        break;
      case STAR_REPORT_ABLATION:
        report = star::run_ablation(datasets, base, ectx);
        break;
      default:
        throw star::InvalidArgumentError("unknown report kind");
    }
    report.meta = {{"seed", ctx->config.seed},
                   {"encoder", ctx->dry_run ? "dry-run" : ctx->encoder->backend_id()},
                   {"generation", star::to_string(ctx->generator->config().backend)},
                   {"alpha", base.clustering.alpha},
                   {"k", base.clustering.k},
                   {"beta", base.fusion.beta},
                   {"dim", ctx->config.encoder.dim},
                   {"version", star::kVersion}};
    *out_json = dup_string(star::render_json(report));
    if (out_text) *out_text = dup_string(star::render_text(report));
    if (out_any_failed) *out_any_failed = report.any_failed() ? 1 : 0;
  });
}

}  // extern "C"
