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

#include "star/config.hpp"

#include <set>

#include "star/error.hpp"
#include "star/evaluation.hpp"

namespace star {

using nlohmann::json;

namespace {

// Reads an object section, rejecting keys the reader did not consume.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw InvalidArgumentError("config section '" + name_ + "' must be an object");
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.contains(k)) throw InvalidArgumentError("unknown config key '" + name_ + "." + k + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw InvalidArgumentError("config key '" + name_ + "." + key + "': " + e.what());
    }
  }
  const json* sub(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> used_;
};

void read_encoder(const json& j, EncoderConfig& c) {
  Section s(j, "encoder");
  std::string backend = to_string(c.backend);
  s.get("backend", backend);
  c.backend = encoder_backend_from_string(backend);
  // Remote services report their own dimension unless one is pinned.
  if (c.backend == EncoderBackend::kRemote && !j.contains("dim")) c.dim = 0;
  s.get("dim", c.dim);
  s.get("hash_seed", c.hash_seed);
  s.get("endpoint", c.endpoint);
  s.get("token", c.auth_token);
  s.get("batch_size", c.batch_size);
  s.get("timeout_ms", c.timeout_ms);
  s.get("max_attempts", c.max_attempts);
  s.get("backoff_ms", c.backoff_ms);
  s.get("max_in_flight", c.max_in_flight);
  std::string cache;
  s.get("cache", cache);
  if (!cache.empty()) c.cache_path = cache;
  s.finish();
}

void read_generation(const json& j, GenConfig& c) {
  Section s(j, "generation");
  std::string backend = to_string(c.backend);
  s.get("backend", backend);
  c.backend = gen_backend_from_string(backend);
  std::string api = to_string(c.api);
  s.get("api", api);
  c.api = gen_api_from_string(api);
  s.get("endpoint", c.endpoint);
  s.get("model", c.model);
  s.get("token", c.auth_token);
  s.get("temperature", c.temperature);
  s.get("timeout_ms", c.timeout_ms);
  s.get("retries", c.retries);
  s.get("backoff_ms", c.backoff_ms);
  s.get("max_in_flight", c.max_in_flight);
  s.get("max_prompt_rows", c.max_prompt_rows);
  std::string lang;
  s.get("lang", lang);
  if (!lang.empty()) c.lang = lang;
  s.get("fallback", c.fallback);
  s.finish();
}

void read_clustering(const json& j, ClusteringConfig& c) {
  Section s(j, "clustering");
  s.get("alpha", c.alpha);
  s.get("k", c.k);
  s.get("max_iters", c.max_iters);
  s.get("tol", c.tol);
  s.finish();
}

void read_fusion(const json& j, FusionConfig& c) {
  Section s(j, "fusion");
  std::string strategy = to_string(c.strategy);
  s.get("strategy", strategy);
  c.strategy = fusion_strategy_from_string(strategy);
  s.get("lambda", c.lambda);
  s.get("beta", c.beta);
  s.get("separator", c.query_separator);
  s.finish();
}

void read_variant(const json& j, PipelineFlags& f) {
  Section s(j, "variant");
  s.get("scqg", f.use_scqg);
  s.get("wf", f.use_wf);
  s.get("header", f.use_header);
  s.finish();
}

}  // namespace

void RunConfig::validate() const {
  encoder.validate();
  generation.validate();
  pipeline.clustering.validate();
  pipeline.fusion.validate();
  if (parallelism < 1) throw InvalidArgumentError("parallelism must be >= 1");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgumentError("sweep lambda outside [0, 1]");
  }
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw InvalidArgumentError("dataset without a name");
    if (!names.insert(d.name).second) throw InvalidArgumentError("duplicate dataset name '" + d.name + "'");
  }
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  c.lambdas = default_lambda_grid();
  {
    Section s(j, "config");
    s.get("seed", c.seed);
    s.get("parallelism", c.parallelism);
    s.get("log_level", c.log_level);
    s.get("dry_run", c.dry_run);
    if (const json* e = s.sub("encoder")) read_encoder(*e, c.encoder);
    if (const json* g = s.sub("generation")) read_generation(*g, c.generation);
    if (const json* cl = s.sub("clustering")) read_clustering(*cl, c.pipeline.clustering);
    if (const json* f = s.sub("fusion")) read_fusion(*f, c.pipeline.fusion);
    if (const json* v = s.sub("variant")) read_variant(*v, c.pipeline.flags);
    if (const json* sw = s.sub("sweep")) {
      Section ss(*sw, "sweep");
      ss.get("lambdas", c.lambdas);
      ss.get("dwf", c.sweep_dwf);
      ss.finish();
    }
    if (const json* ds = s.sub("datasets")) {
      if (!ds->is_array()) throw InvalidArgumentError("config key 'datasets' must be an array");
      for (const auto& d : *ds) {
        Section dsec(d, "datasets[]");
        DatasetSpec spec;
        std::string corpus, queries;
        dsec.get("name", spec.name);
        dsec.get("corpus", corpus);
        dsec.get("queries", queries);
        if (corpus.empty()) throw InvalidArgumentError("dataset entry without 'corpus'");
        spec.corpus = corpus;
        if (!queries.empty()) spec.queries = queries;
        if (spec.name.empty()) spec.name = spec.corpus.stem().string();
        dsec.finish();
        c.datasets.push_back(std::move(spec));
      }
    }
    s.finish();
  }
  c.pipeline.clustering.seed = c.seed;
  c.validate();
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["parallelism"] = c.parallelism;
  j["log_level"] = c.log_level;
  j["dry_run"] = c.dry_run;
  j["encoder"] = {{"backend", to_string(c.encoder.backend)},
                  {"dim", c.encoder.dim},
                  {"hash_seed", c.encoder.hash_seed},
                  {"endpoint", c.encoder.endpoint},
                  {"batch_size", c.encoder.batch_size},
                  {"timeout_ms", c.encoder.timeout_ms},
                  {"max_attempts", c.encoder.max_attempts},
                  {"backoff_ms", c.encoder.backoff_ms},
                  {"max_in_flight", c.encoder.max_in_flight},
                  {"cache", c.encoder.cache_path ? c.encoder.cache_path->string() : ""}};
  j["generation"] = {{"backend", to_string(c.generation.backend)},
                     {"api", to_string(c.generation.api)},
                     {"endpoint", c.generation.endpoint},
                     {"model", c.generation.model},
                     {"temperature", c.generation.temperature},
                     {"timeout_ms", c.generation.timeout_ms},
                     {"retries", c.generation.retries},
                     {"backoff_ms", c.generation.backoff_ms},
                     {"max_in_flight", c.generation.max_in_flight},
                     {"max_prompt_rows", c.generation.max_prompt_rows},
                     {"lang", c.generation.lang.value_or("")},
                     {"fallback", c.generation.fallback}};
  const auto& cl = c.pipeline.clustering;
  j["clustering"] = {{"alpha", cl.alpha}, {"k", cl.k}, {"max_iters", cl.max_iters}, {"tol", cl.tol}};
  const auto& f = c.pipeline.fusion;
  j["fusion"] = {{"strategy", to_string(f.strategy)}, {"lambda", f.lambda}, {"beta", f.beta}, {"separator", f.query_separator}};
  const auto& fl = c.pipeline.flags;
  j["variant"] = {{"scqg", fl.use_scqg}, {"wf", fl.use_wf}, {"header", fl.use_header}};
  j["sweep"] = {{"lambdas", c.lambdas}, {"dwf", c.sweep_dwf}};
  json ds = json::array();
  for (const auto& d : c.datasets) {
    ds.push_back({{"name", d.name}, {"corpus", d.corpus.string()}, {"queries", d.queries ? d.queries->string() : ""}});
  }
  j["datasets"] = std::move(ds);
  return j;
}

}  // namespace star
