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

// star: command-line front end over the C API in star/star.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "star/star.h"

namespace {

using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::string corpus;
  std::string queries;
  std::string dataset_name;
  std::optional<double> alpha;
  std::optional<std::size_t> k;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::string strategy;
  std::string backend;
  std::string endpoint;
  std::optional<std::size_t> dim;
  std::string gen_backend;
  std::string gen_api;
  std::string gen_endpoint;
  std::string gen_model;
  std::optional<unsigned long long> seed;
  std::optional<std::size_t> parallelism;
  std::string cache;
  std::string log_level;
  bool dry_run = false;
  bool no_scqg = false;
  bool no_wf = false;
  bool no_header = false;

  std::size_t top_k = 10;
  std::string out;
  std::string archive;
  std::string index;
  std::string query;
  std::vector<double> lambdas;
  bool no_dwf = false;
};

// Owns a malloc'ed string returned by the C API.
struct CString {
  char* p = nullptr;
  ~CString() { star_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct Context {
  star_context* ctx = nullptr;
  ~Context() { star_context_destroy(ctx); }
};

struct IndexHandle {
  star_index* index = nullptr;
  ~IndexHandle() { star_index_close(index); }
};

int fail(star_status status) {
  std::cerr << "error: " << star_status_string(status) << ": " << star_last_error() << "\n";
  return kExitFailure;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file (flags override it)");
  cmd->add_option("--alpha", o.alpha, "header weight for header-aware clustering (default 0.2)");
  cmd->add_option("--k", o.k, "cluster count / partial-table size (default 10)");
  cmd->add_option("--lambda", o.lambda, "query weight for fixed fusion");
  cmd->add_option("--beta", o.beta, "similarity scale for dynamic fusion (default 0.5)");
  cmd->add_option("--strategy", o.strategy, "fusion strategy")->check(CLI::IsMember({"fixed", "dynamic", "concat"}));
  cmd->add_option("--backend", o.backend, "encoder backend")->check(CLI::IsMember({"reference", "remote"}));
  cmd->add_option("--endpoint", o.endpoint, "embedding service base URL (remote backend)");
  cmd->add_option("--dim", o.dim, "embedding dimension");
  cmd->add_option("--gen-backend", o.gen_backend, "query generation backend")
      ->check(CLI::IsMember({"template", "remote"}));
  cmd->add_option("--gen-api", o.gen_api, "remote generation dialect")->check(CLI::IsMember({"native", "openai"}));
  cmd->add_option("--gen-endpoint", o.gen_endpoint, "generation service base URL");
  cmd->add_option("--gen-model", o.gen_model, "model name for the openai dialect");
  cmd->add_option("--seed", o.seed, "seed for all randomness (default 42)");
  cmd->add_option("--parallelism", o.parallelism, "worker limit");
  cmd->add_option("--cache", o.cache, "embedding cache file");
  cmd->add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off");
  cmd->add_flag("--dry-run", o.dry_run, "use in-process mock services and check request shapes");
  cmd->add_flag("--no-scqg", o.no_scqg, "first-k rows and one direct query instead of clustering");
  cmd->add_flag("--no-wf", o.no_wf, "concatenate table and queries instead of weighted fusion");
  cmd->add_flag("--no-header", o.no_header, "cluster on instance embeddings only");
}

void add_dataset(CLI::App* cmd, Options& o, bool with_queries) {
  cmd->add_option("--corpus", o.corpus, "corpus JSONL");
  if (with_queries) {
    cmd->add_option("--queries", o.queries, "evaluation query JSONL");
    cmd->add_option("--name", o.dataset_name, "dataset name in reports (default: corpus file stem)");
  }
}

json build_config(const Options& o, const std::string& default_cache) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + o.config_path);
    j = json::parse(in);
  }
  auto section = [&](const char* name) -> json& {
    if (!j.contains(name) || !j[name].is_object()) j[name] = json::object();
    return j[name];
  };
  if (o.alpha) section("clustering")["alpha"] = *o.alpha;
  if (o.k) section("clustering")["k"] = *o.k;
  if (o.lambda) section("fusion")["lambda"] = *o.lambda;
  if (o.beta) section("fusion")["beta"] = *o.beta;
  if (!o.strategy.empty()) section("fusion")["strategy"] = o.strategy;
  if (!o.backend.empty()) section("encoder")["backend"] = o.backend;
  if (!o.endpoint.empty()) section("encoder")["endpoint"] = o.endpoint;
  if (o.dim) section("encoder")["dim"] = *o.dim;
  if (!o.cache.empty()) section("encoder")["cache"] = o.cache;
  else if (!default_cache.empty() && !section("encoder").contains("cache")) section("encoder")["cache"] = default_cache;
  if (!o.gen_backend.empty()) section("generation")["backend"] = o.gen_backend;
  if (!o.gen_api.empty()) section("generation")["api"] = o.gen_api;
  if (!o.gen_endpoint.empty()) section("generation")["endpoint"] = o.gen_endpoint;
  if (!o.gen_model.empty()) section("generation")["model"] = o.gen_model;
  if (o.seed) j["seed"] = *o.seed;
  if (o.parallelism) j["parallelism"] = *o.parallelism;
  if (!o.log_level.empty()) j["log_level"] = o.log_level;
  if (o.dry_run) j["dry_run"] = true;
  if (o.no_scqg) section("variant")["scqg"] = false;
  if (o.no_wf) section("variant")["wf"] = false;
  if (o.no_header) section("variant")["header"] = false;
  if (!o.lambdas.empty()) section("sweep")["lambdas"] = o.lambdas;
  if (o.no_dwf) section("sweep")["dwf"] = false;
  if (!o.corpus.empty() && !o.queries.empty()) {
    const std::string name =
        o.dataset_name.empty() ? std::filesystem::path(o.corpus).stem().string() : o.dataset_name;
    j["datasets"] = json::array({{{"name", name}, {"corpus", o.corpus}, {"queries", o.queries}}});
  }
  return j;
}

int open_context(const Options& o, Context& c, const std::string& default_cache = {}) {
  json config;
  try {
    config = build_config(o, default_cache);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  if (auto st = star_context_create(config.dump().c_str(), &c.ctx); st != STAR_OK) return fail(st);
  return 0;
}

int report_dry_run(const Context& c) {
  CString summary;
  if (star_context_dry_run_summary(c.ctx, &summary.p) != STAR_OK) return 0;
  std::cerr << "dry-run summary: " << summary.str() << "\n";
  const auto j = json::parse(summary.str());
  return j["violations"].empty() ? 0 : kExitFailure;
}

int cmd_ingest(const Options& o) {
  if (o.corpus.empty()) {
    std::cerr << "error: --corpus is required\n";
    return kExitFailure;
  }
  CString out;
  if (auto st = star_ingest(o.corpus.c_str(), &out.p); st != STAR_OK) return fail(st);
  std::cout << out.str() << "\n";
  return 0;
}

int represent(const Options& o, Context& c, const std::string& archive) {
  star_represent_stats stats{};
  CString failures;
  if (auto st = star_represent(c.ctx, o.corpus.c_str(), archive.c_str(), &stats, &failures.p); st != STAR_OK) {
    return fail(st);
  }
  json line = {{"archive", archive},          {"tables", stats.tables},   {"computed", stats.computed},
               {"skipped", stats.skipped},    {"failed", stats.failed},   {"cache_hits", stats.cache_hits},
               {"backend_texts", stats.backend_texts}};
  std::cout << line.dump() << "\n";
  if (stats.tables == 0) std::cerr << "warning: corpus has no tables; archive is empty\n";
  if (stats.failed > 0) {
    for (const auto& f : json::parse(failures.str())) std::cerr << "failed: " << f.get<std::string>() << "\n";
    return kExitFailure;
  }
  return 0;
}

int cmd_represent(const Options& o) {
  if (o.corpus.empty()) {
    std::cerr << "error: --corpus is required\n";
    return kExitFailure;
  }
  const std::string archive = o.out.empty() ? "representations.jsonl" : o.out;
  Context c;
  if (int rc = open_context(o, c, archive + ".cache")) return rc;
  int rc = represent(o, c, archive);
  if (report_dry_run(c) != 0) rc = kExitFailure;
  return rc;
}

int cmd_index(const Options& o) {
  const std::string out = o.out.empty() ? "index.star" : o.out;
  if (o.archive.empty() && o.corpus.empty()) {
    std::cerr << "error: --archive or --corpus is required\n";
    return kExitFailure;
  }
  const std::string archive = o.archive.empty() ? out + ".reps.jsonl" : o.archive;
  Context c;
  if (int rc = open_context(o, c, out + ".cache")) return rc;
  if (!o.corpus.empty()) {
    if (int rc = represent(o, c, archive)) return rc;
  }
  std::size_t count = 0;
  if (auto st = star_index_build(c.ctx, archive.c_str(), out.c_str(), &count); st != STAR_OK) return fail(st);
  std::cout << json{{"index", out}, {"entries", count}}.dump() << "\n";
  return report_dry_run(c);
}

int cmd_search(const Options& o) {
  if (o.index.empty() || o.query.empty()) {
    std::cerr << "error: --index and --query are required\n";
    return kExitFailure;
  }
  Context c;
  if (int rc = open_context(o, c, o.index + ".cache")) return rc;
  IndexHandle idx;
  if (auto st = star_index_open(o.index.c_str(), &idx.index); st != STAR_OK) return fail(st);
  CString out;
  if (auto st = star_search(c.ctx, idx.index, o.query.c_str(), o.top_k, &out.p); st != STAR_OK) return fail(st);
  std::cout << out.str();
  return 0;
}

int cmd_report(const Options& o, star_report_kind kind, const char* default_out) {
  if (!o.queries.empty() && !std::filesystem::exists(o.queries)) {
    std::cerr << "error: queries file not found: " << o.queries << "\n";
    return kExitFailure;
  }
  if (!o.corpus.empty() && o.queries.empty()) {
    std::cerr << "error: --queries is required with --corpus\n";
    return kExitFailure;
  }
  Context c;
  if (int rc = open_context(o, c)) return rc;
  CString report_json;
  CString report_text;
  int any_failed = 0;
  if (auto st = star_run_report(c.ctx, kind, &report_json.p, &report_text.p, &any_failed); st != STAR_OK) {
    return fail(st);
  }
  const std::string prefix = o.out.empty() ? default_out : o.out;
  {
    std::ofstream js(prefix + ".json", std::ios::binary | std::ios::trunc);
    std::ofstream txt(prefix + ".txt", std::ios::binary | std::ios::trunc);
    if (!js || !txt) {
      std::cerr << "error: cannot write report files with prefix " << prefix << "\n";
      return kExitFailure;
    }
    js << report_json.str();
    txt << report_text.str();
  }
  std::cout << report_text.str();
  int rc = any_failed ? kExitFailure : 0;
  if (report_dry_run(c) != 0) rc = kExitFailure;
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR table retrieval: clustering-guided representations, fusion and Recall@K evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(star_version()));
  Options o;

  auto* ingest = app.add_subcommand("ingest", "validate a corpus and print a summary");
  ingest->add_option("--corpus", o.corpus, "corpus JSONL")->required();

  auto* represent = app.add_subcommand("represent", "build the representation archive for a corpus");
  add_common(represent, o);
  add_dataset(represent, o, false);
  represent->add_option("--out", o.out, "archive path (default representations.jsonl)");

  auto* index = app.add_subcommand("index", "build an index file from an archive or a corpus");
  add_common(index, o);
  add_dataset(index, o, false);
  index->add_option("--archive", o.archive, "existing representation archive");
  index->add_option("--out", o.out, "index path (default index.star)");

  auto* search = app.add_subcommand("search", "search an index with a natural-language query");
  add_common(search, o);
  search->add_option("--index", o.index, "index file")->required();
  search->add_option("--query", o.query, "query text")->required();
  search->add_option("--top-k", o.top_k, "number of results (default 10)")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Recall@1/5/10 of the configured variant");
  auto* sweep = app.add_subcommand("sweep", "baseline, fixed fusion over the lambda grid, dynamic fusion");
  auto* ablate = app.add_subcommand("ablate", "full model and the three component ablations");
  for (auto* cmd : {eval, sweep, ablate}) {
    add_common(cmd, o);
    add_dataset(cmd, o, true);
    cmd->add_option("--out", o.out, "report path prefix; writes PREFIX.json and PREFIX.txt");
  }
  sweep->add_option("--lambdas", o.lambdas, "fixed-fusion grid (default 0.1 ... 0.9)")->delimiter(',');
  sweep->add_flag("--no-dwf", o.no_dwf, "omit the dynamic fusion row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*ingest) return cmd_ingest(o);
  if (*represent) return cmd_represent(o);
  if (*index) return cmd_index(o);
  if (*search) return cmd_search(o);
  if (*eval) return cmd_report(o, STAR_REPORT_EVAL, "eval_report");
  if (*sweep) return cmd_report(o, STAR_REPORT_SWEEP, "sweep_report");
  if (*ablate) return cmd_report(o, STAR_REPORT_ABLATION, "ablation_report");
  return kExitUsage;
}
