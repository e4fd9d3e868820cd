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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kgforge/eval_metrics.hpp"
#include "kgforge/util.hpp"

namespace kgforge::metrics {
namespace {

// Textbook Jaro written independently of the library: matching window,
// matched flags, ordered comparison for transpositions.
double reference_jaro(const std::string& a, const std::string& b) {
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const int window = std::max(0, static_cast<int>(std::max(a.size(), b.size())) / 2 - 1);
  std::vector<bool> ma(a.size()), mb(b.size());
  int m = 0;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    for (int j = std::max(0, i - window); j < std::min(static_cast<int>(b.size()), i + window + 1); ++j) {
      if (!mb[j] && a[i] == b[j]) {
        ma[i] = mb[j] = true;
        ++m;
        break;
      }
    }
  }
  if (m == 0) return 0.0;
  std::string sa, sb;
  for (std::size_t i = 0; i < a.size(); ++i) if (ma[i]) sa += a[i];
  for (std::size_t j = 0; j < b.size(); ++j) if (mb[j]) sb += b[j];
  int half = 0;
  for (int k = 0; k < m; ++k) half += sa[k] != sb[k];
  const double t = half / 2.0;
  return (static_cast<double>(m) / a.size() + static_cast<double>(m) / b.size() + (m - t) / m) / 3.0;
}

std::string random_word(Rng& rng, std::size_t max_len, std::string_view alphabet) {
  std::string s(uniform_index(rng, max_len + 1), ' ');
  for (auto& c : s) c = alphabet[uniform_index(rng, alphabet.size())];
  return s;
}

TEST(EvalMetrics, MarthaMarhta) {
  EXPECT_NEAR(jaro("MARTHA", "MARHTA"), 0.9444, 1e-4);
  EXPECT_NEAR(jaro_winkler("MARTHA", "MARHTA"), 0.9611, 1e-4);
  // exact values from m = 6, t = 1, l = 3
  EXPECT_DOUBLE_EQ(jaro("MARTHA", "MARHTA"), (1.0 + 1.0 + 5.0 / 6.0) / 3.0);
}

TEST(EvalMetrics, IdentityAndDisjoint) {
  for (const char* s : {"a", "Inception", "Christopher Nolan", "Ünïcödé"}) {
    EXPECT_DOUBLE_EQ(jaro(s, s), 1.0);
    EXPECT_DOUBLE_EQ(jaro_winkler(s, s), 1.0);
  }
  EXPECT_DOUBLE_EQ(jaro("abc", "xyz"), 0.0);
  EXPECT_DOUBLE_EQ(jaro_winkler("abc", "xyz"), 0.0);
  EXPECT_DOUBLE_EQ(jaro("", "abc"), 0.0);
  EXPECT_DOUBLE_EQ(jaro("", ""), 1.0);
}

TEST(EvalMetrics, PrefixIsCappedAtFour) {
  // shared prefix of 6, only 4 count
  const double j = jaro("abcdefgh", "abcdefxy");
  EXPECT_DOUBLE_EQ(jaro_winkler("abcdefgh", "abcdefxy"), j + 4 * 0.1 * (1 - j));
}

TEST(EvalMetrics, MultibyteCharactersCountOnce) {
  // one differing code point; bytewise this would be two
  EXPECT_DOUBLE_EQ(jaro("Zoë", "Zoe"), jaro("Zox", "Zoe"));
}

TEST(EvalMetrics, Profiles) {
  EXPECT_DOUBLE_EQ(threshold_for(parse_profile("general")), 0.90);
  EXPECT_DOUBLE_EQ(threshold_for(parse_profile("Biomedical")), 0.97);
  EXPECT_EQ(profile_name(KgProfile::kBiomedical), "biomedical");
  EXPECT_THROW(parse_profile("legal"), ConfigError);
}

TEST(EvalMetrics, MatchConfigValidation) {
  EXPECT_NO_THROW(MatchConfig{}.validate());
  EXPECT_THROW((MatchConfig{0.0, 0.1, 4}).validate(), ConfigError);
  EXPECT_THROW((MatchConfig{1.1, 0.1, 4}).validate(), ConfigError);
  EXPECT_THROW((MatchConfig{0.9, 0.3, 4}).validate(), ConfigError);
}

TEST(EvalMetrics, Normalization) {
  EXPECT_EQ(normalize_for_matching("  Jean-Paul   SARTRE "), "jean paul sartre");
}

TEST(EvalMetrics, PrecisionExamples) {
  std::vector<std::string> gold;
  for (int i = 0; i < 12; ++i) gold.push_back("Entity Number " + std::string(1, static_cast<char>('A' + i)));
  const MatchConfig cfg;
  EXPECT_DOUBLE_EQ(precision_at_10({gold.begin(), gold.begin() + 10}, gold, cfg).precision, 1.0);

  std::vector<std::string> three{gold[0], gold[1], gold[2]};
  for (int i = 0; i < 7; ++i) three.push_back("qqqq" + std::to_string(i));
  const auto out = precision_at_10(three, gold, cfg);
  EXPECT_DOUBLE_EQ(out.precision, 0.3);
  EXPECT_EQ(out.matched, 3u);
  ASSERT_EQ(out.matches.size(), 10u);
  EXPECT_EQ(out.matches[0].matched_gold, gold[0]);
  EXPECT_FALSE(out.matches[5].matched_gold.has_value());

  EXPECT_DOUBLE_EQ(precision_at_10({}, gold, cfg).precision, 0.0);
  // fewer than ten answers still divide by ten
  EXPECT_DOUBLE_EQ(precision_at_10({gold[3]}, gold, cfg).precision, 0.1);
}

TEST(EvalMetrics, CaseAndSpacingDoNotMatter) {
  const auto out = precision_at_10({"christopher  NOLAN"}, {"Christopher Nolan"}, MatchConfig{});
  EXPECT_EQ(out.matched, 1u);
  EXPECT_DOUBLE_EQ(out.matches[0].best_score, 1.0);
}

TEST(EvalMetrics, GoldIsConsumedOnce) {
  const auto out = precision_at_10({"Paris", "Paris.", "paris"}, {"Paris"}, MatchConfig{});
  EXPECT_EQ(out.matched, 1u);
}

TEST(EvalMetrics, ThresholdSeparatesNearMisses) {
  const std::vector<std::string> gold{"Gabapentin"};
  const double s = jaro_winkler("gabapentine", "gabapentin");
  EXPECT_GT(s, 0.90);
  EXPECT_LT(s, 0.99);
  EXPECT_EQ(precision_at_10({"Gabapentine"}, gold, MatchConfig{0.90, 0.1, 4}).matched, 1u);
  EXPECT_EQ(precision_at_10({"Gabapentine"}, gold, MatchConfig{0.99, 0.1, 4}).matched, 0u);
}

TEST(EvalMetrics, AggregateConstantScores) {
  const auto& cat = query::default_catalog();
  std::vector<ScoredItem> items;
  for (const auto& e : cat) for (int i = 0; i < 100; ++i) items.push_back({e.formula, 0.5});
  const auto r = aggregate(items, cat);
  EXPECT_DOUBLE_EQ(r.overall.mean_percent(), 50.0);
  for (const auto& [f, c] : r.by_family) EXPECT_DOUBLE_EQ(c.mean_percent(), 50.0);
  for (const auto& [d, c] : r.by_depth) EXPECT_DOUBLE_EQ(c.mean_percent(), 50.0);
  for (const auto& [v, c] : r.by_variety) EXPECT_DOUBLE_EQ(c.mean_percent(), 50.0);
  for (const auto& c : r.by_pattern) EXPECT_DOUBLE_EQ(c.mean_percent(), 50.0);
  EXPECT_EQ(r.by_family.at(query::Family::kNegation).count, 800u);
  EXPECT_EQ(r.by_variety.size(), 4u);
  EXPECT_THROW(aggregate({{"(p,(p,(p,(p,(e)))))", 1.0}}, cat), AggregationError);
}

TEST(EvalMetrics, FamilyMeansRecomputeFromPatterns) {
  const auto& cat = query::default_catalog();
  Rng rng(3);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 3000; ++i) {
    items.push_back({cat[uniform_index(rng, cat.size())].formula, static_cast<double>(uniform_index(rng, 11)) / 10});
  }
  const auto r = aggregate(items, cat);
  std::map<query::Family, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    acc[cat[i].family].first += r.by_pattern[i].sum;
    acc[cat[i].family].second += r.by_pattern[i].count;
  }
  for (const auto& [f, sc] : acc) {
    EXPECT_NEAR(r.by_family.at(f).mean_percent(), 100.0 * sc.first / sc.second, 1e-9);
  }
  double total = 0;
  for (const auto& it : items) total += it.precision;
  EXPECT_NEAR(r.overall.mean_percent(), 100.0 * total / items.size(), 1e-9);
}

TEST(EvalMetrics, SetOpArithmetic) {
  const auto r = set_op_test(0.5, 10, 0.2, 30, 0.275);
  EXPECT_NEAR(r.before, 0.275, 1e-12);
  EXPECT_NEAR(r.drop, 0.0, 1e-12);
  const auto neg = set_op_test(0.1, 10, 0.1, 10, 0.4);
  EXPECT_NEAR(neg.drop, -0.3, 1e-12);
  EXPECT_THROW(set_op_test(0.1, 0, 0.1, 0, 0.0), ContractViolation);
}

// Property checks on random strings.
TEST(EvalMetricsProperty, AgreesWithReferenceJaro) {
  Rng rng(8);
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_word(rng, 12, "abcde");
    const auto b = random_word(rng, 12, "abcde");
    ASSERT_NEAR(jaro(a, b), reference_jaro(a, b), 1e-12) << a << " / " << b;
  }
}

TEST(EvalMetricsProperty, SymmetryBoundsAndBoost) {
  Rng rng(9);
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_word(rng, 15, "abcdef ");
    const auto b = random_word(rng, 15, "abcdef ");
    const double j = jaro(a, b);
    const double jw = jaro_winkler(a, b);
    ASSERT_DOUBLE_EQ(j, jaro(b, a));
    ASSERT_DOUBLE_EQ(jw, jaro_winkler(b, a));
    ASSERT_GE(j, 0.0);
    ASSERT_LE(jw, 1.0);
    ASSERT_GE(jw, j);
  }
}

TEST(EvalMetricsProperty, PrecisionIgnoresGoldOrder) {
  Rng rng(10);
  const MatchConfig cfg;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> gold, answers;
    for (int g = 0; g < 15; ++g) gold.push_back(random_word(rng, 8, "abcdefgh"));
    for (int a = 0; a < 10; ++a) {
      answers.push_back(uniform_index(rng, 2) ? gold[uniform_index(rng, gold.size())] : random_word(rng, 8, "abcdefgh"));
    }
    const auto base = precision_at_10(answers, gold, cfg);
    auto shuffled = gold;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = precision_at_10(answers, shuffled, cfg);
    ASSERT_EQ(base.matched, again.matched);
    for (std::size_t k = 0; k < base.matches.size(); ++k) {
      ASSERT_EQ(base.matches[k].matched_gold, again.matches[k].matched_gold);
    }
    ASSERT_LE(base.matched, std::min<std::size_t>(answers.size(), 10));
    ASSERT_DOUBLE_EQ(base.precision, base.matched / 10.0);
  }
}

TEST(EvalMetricsProperty, HigherThresholdNeverMatchesMore) {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> gold, answers;
    for (int g = 0; g < 6; ++g) gold.push_back(random_word(rng, 6, "abc"));
    for (int a = 0; a < 10; ++a) answers.push_back(random_word(rng, 6, "abc"));
    std::size_t prev = 11;
    for (double t : {0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.97, 1.0}) {
      const auto m = precision_at_10(answers, gold, MatchConfig{t, 0.1, 4}).matched;
      ASSERT_LE(m, prev) << "threshold " << t;
      prev = m;
    }
  }
}

TEST(EvalMetricsProperty, WeightedBeforeMatchesDirectArithmetic) {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const double s1 = uniform_unit(rng), s2 = uniform_unit(rng), after = uniform_unit(rng);
    const double n1 = 1 + static_cast<double>(uniform_index(rng, 200));
    const double n2 = 1 + static_cast<double>(uniform_index(rng, 200));
    const auto r = set_op_test(s1, n1, s2, n2, after);
    const double expect = s1 * (n1 / (n1 + n2)) + s2 * (n2 / (n1 + n2));
    ASSERT_NEAR(r.before, expect, 1e-12);
    ASSERT_NEAR(r.drop, expect - after, 1e-12);
  }
}

}  // namespace
}  // namespace kgforge::metrics
