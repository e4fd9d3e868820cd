// Copyright 2026 The kgforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kgforge/eval_metrics.hpp"
#include "kgforge/query_ast.hpp"
#include "kgforge/records.hpp"

namespace kgforge::report {

/// Scores of the "main" records only; sub-questions feed the set-op table.
std::vector<metrics::ScoredItem> main_items(const std::vector<records::EvalRecord>& evals);

/// Family (Pro. Int. Uni. Neg.) | depth (1-3) | average, in percent.
std::string format_main_table(const metrics::Report& report, std::string_view label);
std::string main_table_csv(const metrics::Report& report, std::string_view label);

/// One row per catalog pattern that has records.
std::string format_pattern_table(const metrics::Report& report,
                                 const std::vector<query::PatternCatalogEntry>& catalog);

/// `after` minus `before` per operation variety 1-4, signed, in percent.
std::string format_variety_deltas(const metrics::Report& before, const metrics::Report& after,
                                  std::string_view label);

struct SetOpSummary {
  metrics::SetOpResult result;  // fractions in [0, 1]; before/after are means over questions
  std::size_t questions = 0;
};

struct SetOpTable {
  SetOpSummary intersection;
  SetOpSummary union_;
};

/// Averages per-question set-op results. Zero questions gives zeros.
SetOpSummary summarize_set_op(const std::vector<metrics::SetOpResult>& per_question);

/// Pairs each i/u-rooted main record with its two sub-question records.
/// Main records without both subs are skipped.
SetOpTable set_op_table(const std::vector<records::EvalRecord>& evals);

std::string format_set_op_table(const SetOpTable& table, std::string_view label);

}  // namespace kgforge::report
