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

#include "star/evaluation.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "star/error.hpp"
#include "star/util.hpp"

namespace star {

using nlohmann::json;

namespace {

MethodVariant make_variant(std::string name, const PipelineConfig& base, PipelineFlags flags,
                           FusionStrategy strategy) {
  MethodVariant v{std::move(name), base};
  v.config.flags = flags;
  v.config.fusion.strategy = strategy;
  return v;
}

}  // namespace

MethodVariant star_full(const PipelineConfig& base) {
  return make_variant("STAR (full)", base, {true, true, true}, FusionStrategy::kDynamic);
}

MethodVariant star_fixed(const PipelineConfig& base, double lambda) {
  auto v = make_variant(fmt::format("STAR w/ FWF (lambda={:g})", lambda), base, {true, true, true},
                        FusionStrategy::kFixed);
  v.config.fusion.lambda = lambda;
  return v;
}

MethodVariant without_scqg(const PipelineConfig& base) {
  return make_variant("w/o SCQG", base, {false, true, true}, FusionStrategy::kDynamic);
}

MethodVariant without_wf(const PipelineConfig& base) {
  return make_variant("w/o WF", base, {true, false, true}, FusionStrategy::kConcat);
}

MethodVariant without_header(const PipelineConfig& base) {
  auto v = make_variant("w/o Header-aware", base, {true, true, false}, FusionStrategy::kDynamic);
  v.config.clustering.alpha = 0.0;
  return v;
}

MethodVariant qgpt_baseline(const PipelineConfig& base) {
  return make_variant("QGpT", base, {false, false, true}, FusionStrategy::kConcat);
}

std::vector<double> default_lambda_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

int recall_at_k(const SearchResult& result, std::span<const std::string> gold_ids, std::size_t k) {
  const std::size_t limit = std::min(k, result.hits.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (std::find(gold_ids.begin(), gold_ids.end(), result.hits[i].table_id) != gold_ids.end()) return 1;
  }
  return 0;
}

void check_gold(const Corpus& corpus, std::span<const EvalQuery> queries) {
  std::set<std::string> missing;
  for (const auto& q : queries) {
    for (const auto& id : q.gold_ids) {
      if (!corpus.contains(id)) missing.insert(id);
    }
  }
  if (!missing.empty()) throw MissingGoldError({missing.begin(), missing.end()});
}

EvalOutcome evaluate(const Dataset& dataset, const MethodVariant& variant, EvalContext& ctx) {
  check_gold(dataset.corpus, dataset.queries);
  if (dataset.queries.empty()) throw EmptyError("dataset '" + dataset.name + "' has no queries");
  if (dataset.corpus.empty()) throw EmptyError("dataset '" + dataset.name + "' has no tables");

  const auto& tables = dataset.corpus.tables();
  EvalOutcome outcome;
  outcome.representations.resize(tables.size());
  parallel_for(tables.size(), ctx.workers, [&](std::size_t i) {
    outcome.representations[i] = build_representation(tables[i], variant.config, ctx.generator, ctx.encoder);
  });
  const auto& first = outcome.representations.front();
  Index index(first.e_t.dim(), first.fingerprint);
  for (const auto& rep : outcome.representations) index.add(rep);

  std::vector<std::string> texts;
  texts.reserve(dataset.queries.size());
  for (const auto& q : dataset.queries) texts.push_back(q.text);
  const auto query_vecs = ctx.encoder.encode_batch(texts);

  constexpr std::size_t kDepth = kRecallKs.back();
  std::array<std::size_t, kRecallKs.size()> hits{};
  outcome.gold_rank.resize(dataset.queries.size(), 0);
  for (std::size_t qi = 0; qi < dataset.queries.size(); ++qi) {
    const auto& gold = dataset.queries[qi].gold_ids;
    SearchResult result = index.search(query_vecs[qi], kDepth);
    for (std::size_t r = 0; r < result.hits.size(); ++r) {
      if (std::find(gold.begin(), gold.end(), result.hits[r].table_id) != gold.end()) {
        outcome.gold_rank[qi] = r + 1;
        break;
      }
    }
    for (std::size_t ki = 0; ki < kRecallKs.size(); ++ki) hits[ki] += recall_at_k(result, gold, kRecallKs[ki]);
  }
  const double n = static_cast<double>(dataset.queries.size());
  outcome.recall = {hits[0] / n, hits[1] / n, hits[2] / n};
  return outcome;
}

bool EvalReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const VariantRow& r) { return r.error.has_value(); });
}

namespace {

Recall average(std::span<const Recall> values) {
  Recall avg;
  if (values.empty()) return avg;
  for (const auto& v : values) {
    avg.r1 += v.r1;
    avg.r5 += v.r5;
    avg.r10 += v.r10;
  }
  const double n = static_cast<double>(values.size());
  return {avg.r1 / n, avg.r5 / n, avg.r10 / n};
}

VariantRow run_variant(std::span<const Dataset> datasets, const MethodVariant& variant, EvalContext& ctx) {
  VariantRow row;
  row.name = variant.name;
  try {
    for (const auto& ds : datasets) {
      try {
        row.metrics.push_back(evaluate(ds, variant, ctx).recall);
      } catch (Error& e) {
        e.add_context("dataset '" + ds.name + "'");
        throw;
      }
    }
    row.avg = average(row.metrics);
  } catch (const Error& e) {
    spdlog::error("variant '{}' failed: {}", variant.name, e.what());
    row.metrics.assign(datasets.size(), Recall{});
    row.error = e.what();
  }
  return row;
}

EvalReport make_report(ReportKind kind, std::span<const Dataset> datasets) {
  EvalReport report;
  report.kind = kind;
  for (const auto& ds : datasets) report.datasets.push_back(ds.name);
  return report;
}

const char* kind_name(ReportKind kind) {
  switch (kind) {
    case ReportKind::kEval: return "eval";
    case ReportKind::kSweep: return "sweep";
    case ReportKind::kAblation: return "ablation";
  }
  return "eval";
}

}  // namespace

EvalReport run_eval(std::span<const Dataset> datasets, const MethodVariant& variant, EvalContext& ctx) {
  auto report = make_report(ReportKind::kEval, datasets);
  report.rows.push_back(run_variant(datasets, variant, ctx));
  return report;
}

EvalReport run_sweep(std::span<const Dataset> datasets, const PipelineConfig& base,
                     std::span<const double> lambdas, bool plus_dwf, EvalContext& ctx) {
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgumentError(fmt::format("lambda {} outside [0, 1]", l));
  }
  auto report = make_report(ReportKind::kSweep, datasets);
  report.rows.push_back(run_variant(datasets, qgpt_baseline(base), ctx));
  for (double l : lambdas) report.rows.push_back(run_variant(datasets, star_fixed(base, l), ctx));
  if (plus_dwf) {
    auto dwf = star_full(base);
    dwf.name = "STAR w/ DWF";
    report.rows.push_back(run_variant(datasets, dwf, ctx));
  }
  return report;
}

EvalReport run_ablation(std::span<const Dataset> datasets, const PipelineConfig& base, EvalContext& ctx) {
  auto report = make_report(ReportKind::kAblation, datasets);
  for (const auto& v : {star_full(base), without_scqg(base), without_wf(base), without_header(base)}) {
    report.rows.push_back(run_variant(datasets, v, ctx));
  }
  const Recall full = report.rows.front().avg;
  for (auto& row : report.rows) {
    row.delta = Recall{row.avg.r1 - full.r1, row.avg.r5 - full.r5, row.avg.r10 - full.r10};
  }
  return report;
}

namespace {

json recall_json(const Recall& r) { return {{"r1", r.r1}, {"r5", r.r5}, {"r10", r.r10}}; }

std::string pct(double v) { return fmt::format("{:.2f}", v * 100.0); }

std::string pad(const std::string& s, std::size_t width, bool left_align) {
  if (s.size() >= width) return s;
  return left_align ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

std::string render_grid(const std::vector<std::vector<std::string>>& cells, std::size_t header_rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  std::size_t total = 0;
  for (auto w : widths) total += w + 2;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c > 0) line += "  ";
      // Group labels above the metric columns read left to right.
      line += pad(cells[r][c], widths[c], c == 0 || r + 1 < header_rows);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r + 1 == header_rows) out += std::string(total > 2 ? total - 2 : 0, '-') + "\n";
  }
  return out;
}

// Column values -> markers for best ("**") and second best ("__").
std::vector<std::string> mark_column(const std::vector<double>& values, const std::vector<bool>& valid) {
  std::set<double, std::greater<>> distinct;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid[i]) distinct.insert(values[i]);
  }
  const auto best = distinct.empty() ? std::optional<double>() : *distinct.begin();
  const auto second = distinct.size() < 2 ? std::optional<double>() : *std::next(distinct.begin());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string v = valid[i] ? pct(values[i]) : "n/a";
    if (valid[i] && best && values[i] == *best) out.push_back("**" + v + "**");
    else if (valid[i] && second && values[i] == *second) out.push_back("__" + v + "__");
    else out.push_back(v);
  }
  return out;
}

std::string render_grid_report(const EvalReport& report) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> top = {"Method"};
  std::vector<std::string> sub = {""};
  for (const auto& ds : report.datasets) {
    top.insert(top.end(), {ds, "", ""});
    sub.insert(sub.end(), {"R@1", "R@5", "R@10"});
  }
  top.insert(top.end(), {"Avg.", "", ""});
  sub.insert(sub.end(), {"R@1", "R@5", "R@10"});
  cells.push_back(top);
  cells.push_back(sub);

  const std::size_t n_rows = report.rows.size();
  const std::size_t n_cols = (report.datasets.size() + 1) * 3;
  std::vector<bool> valid(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) valid[r] = !report.rows[r].error;
  std::vector<std::vector<std::string>> body(n_rows, std::vector<std::string>{});
  for (std::size_t r = 0; r < n_rows; ++r) body[r].push_back(report.rows[r].name);
  for (std::size_t col = 0; col < n_cols; ++col) {
    const std::size_t ds = col / 3;
    const std::size_t ki = col % 3;
    std::vector<double> values(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      const auto& row = report.rows[r];
      values[r] = ds < report.datasets.size() ? row.metrics[ds].at(ki) : row.avg.at(ki);
    }
    auto marked = mark_column(values, valid);
    for (std::size_t r = 0; r < n_rows; ++r) body[r].push_back(std::move(marked[r]));
  }
  for (auto& row : body) cells.push_back(std::move(row));
  std::string out = render_grid(cells, 2);
  for (const auto& row : report.rows) {
    if (row.error) out += "FAILED " + row.name + ": " + *row.error + "\n";
  }
  return out;
}

std::string render_delta_report(const EvalReport& report) {
  std::vector<std::vector<std::string>> cells = {{"Method", "R@1", "R@5", "R@10"}};
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    std::vector<std::string> line = {r == 0 ? row.name : "  " + row.name};
    for (std::size_t ki = 0; ki < 3; ++ki) {
      if (row.error) {
        line.push_back("n/a");
      } else if (r == 0 || !row.delta) {
        line.push_back(pct(row.avg.at(ki)));
      } else {
        const double d = row.delta->at(ki) * 100.0;
        line.push_back(fmt::format("{} ({}{:.2f})", pct(row.avg.at(ki)), d < 0 ? "-" : "+", std::abs(d)));
      }
    }
    cells.push_back(std::move(line));
  }
  std::string out = render_grid(cells, 1);
  for (const auto& row : report.rows) {
    if (row.error) out += "FAILED " + row.name + ": " + *row.error + "\n";
  }
  return out;
}

}  // namespace

json report_to_json(const EvalReport& report) {
  json j;
  j["kind"] = kind_name(report.kind);
  j["datasets"] = report.datasets;
  json variants = json::array();
  for (const auto& row : report.rows) {
    json v;
    v["name"] = row.name;
    json metrics = json::object();
    for (std::size_t d = 0; d < report.datasets.size(); ++d) metrics[report.datasets[d]] = recall_json(row.metrics[d]);
    v["metrics"] = std::move(metrics);
    v["avg"] = recall_json(row.avg);
    if (row.delta) v["delta"] = recall_json(*row.delta);
    if (row.error) v["error"] = *row.error;
    variants.push_back(std::move(v));
  }
  j["variants"] = std::move(variants);
  j["meta"] = report.meta;
  return j;
}

std::string render_json(const EvalReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string render_text(const EvalReport& report) {
  return report.kind == ReportKind::kAblation ? render_delta_report(report) : render_grid_report(report);
}

}  // namespace star
