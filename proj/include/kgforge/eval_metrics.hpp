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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/common.hpp"
#include "kgforge/query_ast.hpp"

namespace kgforge::metrics {

inline constexpr double kGeneralThreshold = 0.90;
inline constexpr double kBiomedicalThreshold = 0.97;

enum class KgProfile { kGeneral, kBiomedical };

KgProfile parse_profile(std::string_view text);
std::string_view profile_name(KgProfile profile);
double threshold_for(KgProfile profile);

struct MatchConfig {
  double threshold = kGeneralThreshold;
  double prefix_scale = 0.1;
  int max_prefix = 4;

  /// Throws ConfigError unless threshold in (0, 1] and prefix_scale * max_prefix <= 1.
  void validate() const;
};

/// Jaro similarity over Unicode code points of UTF-8 input.
double jaro(std::string_view s1, std::string_view s2);

/// jaro + l * p * (1 - jaro), l = common prefix length capped at max_prefix.
/// The prefix boost is applied unconditionally.
double jaro_winkler(std::string_view s1, std::string_view s2, const MatchConfig& config = {});

/// Case fold, hyphens to spaces, whitespace collapsed and trimmed.
std::string normalize_for_matching(std::string_view text);

struct AnswerMatch {
  std::string answer;
  double best_score = 0.0;
  std::optional<std::string> matched_gold;
};

struct PrecisionOutcome {
  std::vector<AnswerMatch> matches;
  std::size_t matched = 0;
  double precision = 0.0;
};

/// Greedy one-to-one matching in extraction order: each answer takes the
/// unconsumed gold name with the highest Jaro-Winkler score (ties go to the
/// smaller normalized then raw gold string) if that score reaches the
/// threshold. Precision is matched / 10.
PrecisionOutcome precision_at_10(const std::vector<std::string>& extracted,
                                 const std::vector<std::string>& gold, const MatchConfig& config);

/// What the aggregation needs from one scored record.
struct ScoredItem {
  std::string formula;
  double precision = 0.0;
};

struct Cell {
  double sum = 0.0;
  std::size_t count = 0;
  double mean_percent() const { return count ? 100.0 * sum / static_cast<double>(count) : 0.0; }
};

struct Report {
  std::map<query::Family, Cell> by_family;
  std::map<int, Cell> by_depth;
  std::map<int, Cell> by_variety;
  std::vector<Cell> by_pattern;  // parallel to the catalog
  Cell overall;
};

class AggregationError : public Error {
 public:
  using Error::Error;
};

Report aggregate(const std::vector<ScoredItem>& items,
                 const std::vector<query::PatternCatalogEntry>& catalog);

struct SetOpResult {
  double s1 = 0.0;
  double s2 = 0.0;
  double size1 = 0.0;
  double size2 = 0.0;
  double before = 0.0;  // gold-size weighted mean of the sub-question scores
  double after = 0.0;   // score on the composite question
  double drop = 0.0;    // before - after, may be negative
};

/// Throws ContractViolation when both gold sizes are zero.
SetOpResult set_op_test(double s1, double size1, double s2, double size2, double after);

}  // namespace kgforge::metrics
