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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "star/encoder.hpp"
#include "star/fusion.hpp"
#include "star/index.hpp"
#include "star/querygen.hpp"
#include "star/table.hpp"

namespace star {

inline constexpr std::array<std::size_t, 3> kRecallKs = {1, 5, 10};

struct Recall {
  double r1 = 0.0;
  double r5 = 0.0;
  double r10 = 0.0;

  double at(std::size_t i) const { return i == 0 ? r1 : i == 1 ? r5 : r10; }
  bool operator==(const Recall&) const = default;
};

struct MethodVariant {
  std::string name;
  PipelineConfig config;
};

// The method variants of the sweep and ablation reports, derived from `base`.
MethodVariant star_full(const PipelineConfig& base);       // SCQG + dynamic fusion
MethodVariant star_fixed(const PipelineConfig& base, double lambda);
MethodVariant without_scqg(const PipelineConfig& base);    // first-k rows, one direct query
MethodVariant without_wf(const PipelineConfig& base);      // concatenation encoding
MethodVariant without_header(const PipelineConfig& base);  // alpha = 0
MethodVariant qgpt_baseline(const PipelineConfig& base);   // first-k rows + concatenation

struct Dataset {
  std::string name;
  Corpus corpus;
  std::vector<EvalQuery> queries;
};

// 1 when any gold id is among the first k hits.
int recall_at_k(const SearchResult& result, std::span<const std::string> gold_ids, std::size_t k);

// Throws MissingGoldError listing every gold id absent from the corpus.
void check_gold(const Corpus& corpus, std::span<const EvalQuery> queries);

struct EvalContext {
  EncoderGateway& encoder;
  QueryGenerator& generator;
  std::size_t workers = 1;
};

struct EvalOutcome {
  Recall recall;
  std::vector<std::size_t> gold_rank;  // per query, 1-based rank of the first gold hit; 0 if beyond 10
  std::vector<TableRepresentation> representations;
};

EvalOutcome evaluate(const Dataset& dataset, const MethodVariant& variant, EvalContext& ctx);

struct VariantRow {
  std::string name;
  std::vector<Recall> metrics;  // aligned with EvalReport::datasets
  Recall avg;
  std::optional<Recall> delta;  // ablation rows: avg minus full-model avg
  std::optional<std::string> error;
};

enum class ReportKind { kEval, kSweep, kAblation };

struct EvalReport {
  ReportKind kind = ReportKind::kEval;
  std::vector<std::string> datasets;
  std::vector<VariantRow> rows;
  nlohmann::json meta = nlohmann::json::object();

  bool any_failed() const;
};

EvalReport run_eval(std::span<const Dataset> datasets, const MethodVariant& variant, EvalContext& ctx);

// Baseline row, one fixed-fusion row per lambda, then the dynamic-fusion row.
EvalReport run_sweep(std::span<const Dataset> datasets, const PipelineConfig& base,
                     std::span<const double> lambdas, bool plus_dwf, EvalContext& ctx);

// Full model, w/o SCQG, w/o WF, w/o Header-aware, each with deltas against the full model.
EvalReport run_ablation(std::span<const Dataset> datasets, const PipelineConfig& base, EvalContext& ctx);

std::vector<double> default_lambda_grid();

// {"datasets", "variants": [{"name", "metrics", "avg", "delta"?, "error"?}], "meta"}.
nlohmann::json report_to_json(const EvalReport& report);
std::string render_json(const EvalReport& report);

// Aligned plain-text table. Recall is shown in percent; per column the best
// value is wrapped in **...** and the second best in __...__. Ablation
// reports show the delta to the full model in parentheses.
std::string render_text(const EvalReport& report);

}  // namespace star
