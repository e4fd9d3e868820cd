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

#include "kgforge/eval_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "kgforge/util.hpp"

namespace kgforge::metrics {

KgProfile parse_profile(std::string_view text) {
  const std::string lower = ascii_lower(trim(text));
  if (lower == "general") return KgProfile::kGeneral;
  if (lower == "biomedical") return KgProfile::kBiomedical;
  throw ConfigError("unknown KG profile '" + std::string(text) + "' (expected general or biomedical)");
}

std::string_view profile_name(KgProfile profile) {
  return profile == KgProfile::kGeneral ? "general" : "biomedical";
}

double threshold_for(KgProfile profile) {
  return profile == KgProfile::kGeneral ? kGeneralThreshold : kBiomedicalThreshold;
}

void MatchConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("match threshold must be in (0, 1]");
  if (prefix_scale < 0.0 || max_prefix < 0) throw ConfigError("prefix parameters must be non-negative");
  if (prefix_scale * max_prefix > 1.0) throw ConfigError("prefix_scale * max_prefix must not exceed 1");
}

namespace {

// Invalid sequences decode byte-by-byte so every input has a code point form.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    bool valid = len > 0 && i + len <= s.size();
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        valid = false;
      } else {
        cp = (cp << 6) | (cc & 0x3f);
      }
    }
    if (!valid) {
      out.push_back(c);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

double jaro_points(const std::u32string& a, const std::u32string& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t longer = std::max(a.size(), b.size());
  const std::size_t window = longer / 2 > 0 ? longer / 2 - 1 : 0;
  std::vector<char> a_matched(a.size(), 0), b_matched(b.size(), 0);
  std::size_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (!b_matched[j] && a[i] == b[j]) {
        a_matched[i] = b_matched[j] = 1;
        ++m;
        break;
      }
    }
  }
  if (m == 0) return 0.0;
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double md = static_cast<double>(m);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  return (md / static_cast<double>(a.size()) + md / static_cast<double>(b.size()) + (md - t) / md) / 3.0;
}

double jaro_winkler_points(const std::u32string& a, const std::u32string& b, const MatchConfig& config) {
  const double j = jaro_points(a, b);
  const std::size_t cap = std::min({a.size(), b.size(), static_cast<std::size_t>(config.max_prefix)});
  std::size_t prefix = 0;
  while (prefix < cap && a[prefix] == b[prefix]) ++prefix;
  return j + static_cast<double>(prefix) * config.prefix_scale * (1.0 - j);
}

}  // namespace

double jaro(std::string_view s1, std::string_view s2) {
  return jaro_points(decode_utf8(s1), decode_utf8(s2));
}

double jaro_winkler(std::string_view s1, std::string_view s2, const MatchConfig& config) {
  return jaro_winkler_points(decode_utf8(s1), decode_utf8(s2), config);
}

std::string normalize_for_matching(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == '-') c = ' ';
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

PrecisionOutcome precision_at_10(const std::vector<std::string>& extracted,
                                 const std::vector<std::string>& gold, const MatchConfig& config) {
  struct GoldName {
    const std::string* raw;
    std::string normalized;
    std::u32string points;
  };
  std::vector<GoldName> golds;
  golds.reserve(gold.size());
  for (const auto& g : gold) {
    std::string n = normalize_for_matching(g);
    std::u32string p = decode_utf8(n);
    golds.push_back(GoldName{&g, std::move(n), std::move(p)});
  }
  std::vector<char> consumed(golds.size(), 0);

  PrecisionOutcome out;
  const std::size_t limit = std::min<std::size_t>(extracted.size(), 10);
  for (std::size_t k = 0; k < limit; ++k) {
    const std::u32string answer = decode_utf8(normalize_for_matching(extracted[k]));
    AnswerMatch match{extracted[k], 0.0, std::nullopt};
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < golds.size(); ++g) {
      if (consumed[g]) continue;
      const double score = jaro_winkler_points(answer, golds[g].points, config);
      const bool better =
          !best || score > match.best_score ||
          (score == match.best_score &&
           std::tie(golds[g].normalized, *golds[g].raw) < std::tie(golds[*best].normalized, *golds[*best].raw));
      if (better) {
        best = g;
        match.best_score = score;
      }
    }
    if (best && match.best_score >= config.threshold) {
      consumed[*best] = 1;
      match.matched_gold = *golds[*best].raw;
      ++out.matched;
    }
    out.matches.push_back(std::move(match));
  }
  out.precision = static_cast<double>(out.matched) / 10.0;
  return out;
}

Report aggregate(const std::vector<ScoredItem>& items,
                 const std::vector<query::PatternCatalogEntry>& catalog) {
  Report report;
  report.by_pattern.resize(catalog.size());
  for (const auto& item : items) {
    const int idx = query::find_pattern(catalog, item.formula);
    if (idx < 0) throw AggregationError("record pattern not in catalog: " + item.formula);
    const auto& entry = catalog[static_cast<std::size_t>(idx)];
    for (Cell* cell : {&report.by_family[entry.family], &report.by_depth[entry.depth],
                       &report.by_variety[entry.variety], &report.by_pattern[static_cast<std::size_t>(idx)],
                       &report.overall}) {
      cell->sum += item.precision;
      ++cell->count;
    }
  }
  return report;
}

SetOpResult set_op_test(double s1, double size1, double s2, double size2, double after) {
  const double total = size1 + size2;
  if (!(total > 0.0)) throw ContractViolation("set-operation test needs a positive total gold size");
  SetOpResult r;
  r.s1 = s1;
  r.s2 = s2;
  r.size1 = size1;
  r.size2 = size2;
  r.before = (size1 * s1 + size2 * s2) / total;
  r.after = after;
  r.drop = r.before - r.after;
  return r;
}

}  // namespace kgforge::metrics
