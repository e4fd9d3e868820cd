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

#include "kgforge/report.hpp"

#include <fmt/format.h>

#include <map>

namespace kgforge::report {

using query::Family;

namespace {

constexpr Family kFamilies[] = {Family::kProjection, Family::kIntersection, Family::kUnion, Family::kNegation};

template <typename Key>
double cell_percent(const std::map<Key, metrics::Cell>& cells, Key key) {
  auto it = cells.find(key);
  return it == cells.end() ? 0.0 : it->second.mean_percent();
}

template <typename Key>
std::string cell_text(const std::map<Key, metrics::Cell>& cells, Key key) {
  auto it = cells.find(key);
  if (it == cells.end() || it->second.count == 0) return "-";
  return fmt::format("{:.2f}", it->second.mean_percent());
}

}  // namespace

std::vector<metrics::ScoredItem> main_items(const std::vector<records::EvalRecord>& evals) {
  std::vector<metrics::ScoredItem> items;
  for (const auto& e : evals) {
    if (e.role == "main") items.push_back(metrics::ScoredItem{e.formula, e.precision});
  }
  return items;
}

std::string format_main_table(const metrics::Report& report, std::string_view label) {
  std::string out = fmt::format("{:<24}|{:>8}{:>8}{:>8}{:>8} |{:>8}{:>8}{:>8} |{:>8}\n", "", "Pro.", "Int.",
                                "Uni.", "Neg.", "1-step", "2-steps", "3-steps", "Average");
  out += fmt::format("{:<24}|", label);
  for (Family f : kFamilies) out += fmt::format("{:>8}", cell_text(report.by_family, f));
  out += " |";
  for (int d = 1; d <= 3; ++d) out += fmt::format("{:>8}", cell_text(report.by_depth, d));
  out += fmt::format(" |{:>8.2f}\n", report.overall.mean_percent());
  return out;
}

std::string main_table_csv(const metrics::Report& report, std::string_view label) {
  std::string out = "label,pro,int,uni,neg,depth1,depth2,depth3,average\n";
  out += std::string(label);
  for (Family f : kFamilies) out += fmt::format(",{:.4f}", cell_percent(report.by_family, f));
  for (int d = 1; d <= 3; ++d) out += fmt::format(",{:.4f}", cell_percent(report.by_depth, d));
  out += fmt::format(",{:.4f}\n", report.overall.mean_percent());
  return out;
}

std::string format_pattern_table(const metrics::Report& report,
                                 const std::vector<query::PatternCatalogEntry>& catalog) {
  std::string out = fmt::format("{:<48} {:<13} {:>5} {:>7} {:>6} {:>9}\n", "pattern", "family", "depth",
                                "variety", "n", "P@10 (%)");
  for (std::size_t i = 0; i < catalog.size() && i < report.by_pattern.size(); ++i) {
    const auto& cell = report.by_pattern[i];
    if (cell.count == 0) continue;
    const auto& e = catalog[i];
    out += fmt::format("{:<48} {:<13} {:>5} {:>7} {:>6} {:>9.2f}\n", e.formula, query::family_name(e.family),
                       e.depth, e.variety, cell.count, cell.mean_percent());
  }
  return out;
}

std::string format_variety_deltas(const metrics::Report& before, const metrics::Report& after,
                                  std::string_view label) {
  std::string out = fmt::format("{:<24}|{:>9}{:>9}{:>9}{:>9}\n", "", "1 type", "2 types", "3 types", "4 types");
  out += fmt::format("{:<24}|", label);
  for (int v = 1; v <= 4; ++v) {
    const auto b = before.by_variety.find(v);
    const auto a = after.by_variety.find(v);
    if (b == before.by_variety.end() || a == after.by_variety.end()) {
      out += fmt::format("{:>9}", "-");
    } else {
      out += fmt::format("{:>+9.2f}", a->second.mean_percent() - b->second.mean_percent());
    }
  }
  out += "\n";
  return out;
}

SetOpSummary summarize_set_op(const std::vector<metrics::SetOpResult>& per_question) {
  SetOpSummary s;
  s.questions = per_question.size();
  if (per_question.empty()) return s;
  const double n = static_cast<double>(per_question.size());
  for (const auto& r : per_question) {
    s.result.s1 += r.s1 / n;
    s.result.s2 += r.s2 / n;
    s.result.size1 += r.size1 / n;
    s.result.size2 += r.size2 / n;
    s.result.before += r.before / n;
    s.result.after += r.after / n;
  }
  s.result.drop = s.result.before - s.result.after;
  return s;
}

SetOpTable set_op_table(const std::vector<records::EvalRecord>& evals) {
  std::map<std::string, std::vector<const records::EvalRecord*>> subs;
  for (const auto& e : evals) {
    if (e.role == "sub" && e.parent) subs[*e.parent].push_back(&e);
  }
  std::vector<metrics::SetOpResult> inter, uni;
  for (const auto& e : evals) {
    if (e.role != "main") continue;
    auto it = subs.find(e.question_id);
    if (it == subs.end() || it->second.size() != 2) continue;
    const auto tree = query::parse_formula(e.formula);
    if (tree.kind != query::NodeKind::kIntersection && tree.kind != query::NodeKind::kUnion) continue;
    const auto* a = it->second[0];
    const auto* b = it->second[1];
    if (b->question_id < a->question_id) std::swap(a, b);
    auto r = metrics::set_op_test(a->precision, static_cast<double>(a->gold_size), b->precision,
                                  static_cast<double>(b->gold_size), e.precision);
    (tree.kind == query::NodeKind::kIntersection ? inter : uni).push_back(r);
  }
  return SetOpTable{summarize_set_op(inter), summarize_set_op(uni)};
}

std::string format_set_op_table(const SetOpTable& table, std::string_view label) {
  std::string out = fmt::format("{:<24}|{:>9}{:>9}{:>9}{:>6} |{:>9}{:>9}{:>9}{:>6}\n", "", "I.before", "I.after",
                                "I.drop", "n", "U.before", "U.after", "U.drop", "n");
  out += fmt::format("{:<24}|", label);
  for (const SetOpSummary* s : {&table.intersection, &table.union_}) {
    if (s->questions == 0) {
      out += fmt::format("{:>9}{:>9}{:>9}{:>6}", "-", "-", "-", 0);
    } else {
      out += fmt::format("{:>9.2f}{:>9.2f}{:>9.2f}{:>6}", 100.0 * s->result.before, 100.0 * s->result.after,
                         100.0 * s->result.drop, s->questions);
    }
    if (s == &table.intersection) out += " |";
  }
  out += "\n";
  if (table.intersection.questions) {
    out += fmt::format("intersection drop={:.2f}\n", 100.0 * table.intersection.result.drop);
  }
  if (table.union_.questions) out += fmt::format("union drop={:.2f}\n", 100.0 * table.union_.result.drop);
  return out;
}

}  // namespace kgforge::report
