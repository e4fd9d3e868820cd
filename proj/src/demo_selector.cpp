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

#include "kgforge/demo_selector.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "kgforge/parallel.hpp"

namespace kgforge::demo {

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::size_t ngram) : dimension_(dimension), ngram_(ngram) {
  if (dimension_ == 0 || ngram_ == 0) throw ConfigError("hashing embedder needs a positive dimension and n-gram size");
}

std::string HashingEmbedder::id() const {
  return fmt::format("hash-{}gram-{}", ngram_, dimension_);
}

std::vector<double> HashingEmbedder::embed(std::string_view text) {
  const std::string padded = " " + ascii_lower(trim(text)) + " ";
  std::vector<double> v(dimension_, 0.0);
  if (padded.size() >= ngram_) {
    for (std::size_t i = 0; i + ngram_ <= padded.size(); ++i) {
      const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, ngram_));
      v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path EmbeddingCache::path_for(std::string_view provider_id, std::string_view text) const {
  std::string key(provider_id);
  key += '\n';
  key += text;
  return dir_ / (sha256_hex(key) + ".vec");
}

std::optional<std::vector<double>> EmbeddingCache::get(std::string_view provider_id, std::string_view text) const {
  const auto path = path_for(provider_id, text);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) {
    spdlog::warn("ignoring unreadable cache entry {}", path.string());
    return std::nullopt;
  }
  return v;
}

void EmbeddingCache::put(std::string_view provider_id, std::string_view text, const std::vector<double>& vec) const {
  std::string body;
  for (double x : vec) body += fmt::format("{:.17g}\n", x);
  const auto path = path_for(provider_id, text);
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, body);
  std::filesystem::rename(tmp, path);
}

namespace {

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void DemoPool::add(llm::Demonstration demo, std::vector<double> vec) {
  if (vec.size() != dimension_) {
    throw ValidationError(fmt::format("embedding for '{}' has {} components, expected {}", demo.question,
                                      vec.size(), dimension_));
  }
  const double n = l2(vec);
  matrix_.insert(matrix_.end(), vec.begin(), vec.end());
  norms_.push_back(n);
  entries_.push_back(PoolEntry{std::move(demo), std::move(vec), n});
}

namespace {

std::string failure_summary(const std::vector<std::string>& failures) {
  std::string out = fmt::format("{} embedding(s) failed:", failures.size());
  for (const auto& f : failures) out += " " + f + ";";
  return out;
}

}  // namespace

PartialPoolError::PartialPoolError(DemoPool partial, std::vector<std::string> failures)
    : Error(failure_summary(failures)), partial_(std::move(partial)), failures_(std::move(failures)) {}

DemoPool build_pool(const std::vector<llm::Demonstration>& questions, EmbeddingProvider& provider,
                    const EmbeddingCache* cache, BuildStats* stats) {
  DemoPool pool(provider.id(), provider.dimension());
  std::vector<std::string> failures;
  BuildStats local;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    std::optional<std::vector<double>> vec;
    if (cache) vec = cache->get(pool.provider_id(), q.question);
    if (vec && vec->size() == pool.dimension()) {
      ++local.cache_hits;
    } else {
      try {
        ++local.provider_calls;
        vec = provider.embed(q.question);
      } catch (const std::exception& e) {
        failures.push_back(fmt::format("#{} ({}): {}", i, q.id.empty() ? q.question : q.id, e.what()));
        continue;
      }
      if (vec->size() != pool.dimension()) {
        throw ValidationError(fmt::format("provider {} returned {} components for #{}, declared {}",
                                          pool.provider_id(), vec->size(), i, pool.dimension()));
      }
      if (cache) cache->put(pool.provider_id(), q.question, *vec);
    }
    pool.add(q, std::move(*vec));
  }
  if (stats) *stats = local;
  if (!failures.empty()) throw PartialPoolError(std::move(pool), std::move(failures));
  return pool;
}

Strategy parse_strategy(std::string_view text) {
  const std::string lower = ascii_lower(trim(text));
  for (Strategy s : {Strategy::kFixed, Strategy::kHighest, Strategy::kRandom, Strategy::kLowest}) {
    if (lower == strategy_name(s)) return s;
  }
  throw ConfigError("unknown demo strategy '" + std::string(text) + "' (expected fixed, highest, random or lowest)");
}

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kFixed: return "fixed";
    case Strategy::kHighest: return "highest";
    case Strategy::kRandom: return "random";
    case Strategy::kLowest: return "lowest";
  }
  return "fixed";
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("cosine of vectors with different sizes");
  const double na = l2(a), nb = l2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

std::vector<std::size_t> select_indices(const DemoPool& pool, std::string_view target_text,
                                        std::span<const double> target_vector, std::size_t k,
                                        Strategy strategy, Rng& rng) {
  if (pool.empty()) throw ContractViolation("demonstration pool is empty");
  std::vector<std::size_t> candidates;
  candidates.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].demo.question != target_text) candidates.push_back(i);
  }
  if (k > candidates.size()) {
    throw ContractViolation(fmt::format("asked for {} demonstrations, only {} candidates", k, candidates.size()));
  }

  switch (strategy) {
    case Strategy::kFixed:
      candidates.resize(k);
      return candidates;
    case Strategy::kRandom:
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
      }
      candidates.resize(k);
      return candidates;
    case Strategy::kHighest:
    case Strategy::kLowest: break;
  }

  if (target_vector.size() != pool.dimension()) {
    throw ContractViolation("target embedding dimension does not match the pool");
  }
  const std::vector<double> scores = parallel::cosine_scan(pool.matrix(), pool.norms(), target_vector);
  const bool highest = strategy == Strategy::kHighest;
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return highest ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  candidates.resize(k);
  return candidates;
}

std::vector<llm::Demonstration> select(const DemoPool& pool, EmbeddingProvider& provider,
                                       std::string_view target_text, std::size_t k, Strategy strategy,
                                       Rng& rng) {
  std::vector<double> target;
  if (strategy == Strategy::kHighest || strategy == Strategy::kLowest) target = provider.embed(target_text);
  std::vector<llm::Demonstration> out;
  for (std::size_t i : select_indices(pool, target_text, target, k, strategy, rng)) out.push_back(pool[i].demo);
  return out;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(fmt::format("embedding csv line {}: unterminated quote", line_no), line_no);
  return fields;
}

}  // namespace

void export_embeddings(const DemoPool& pool, const std::filesystem::path& path) {
  std::string out = "id,pattern,category";
  for (std::size_t j = 0; j < pool.dimension(); ++j) out += fmt::format(",v{}", j);
  out += '\n';
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& e = pool[i];
    out += csv_field(e.demo.id.empty() ? fmt::format("d{}", i) : e.demo.id);
    out += ',' + csv_field(e.demo.pattern) + ',' + csv_field(e.demo.category);
    for (double x : e.vector) out += fmt::format(",{:.17g}", x);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<EmbeddingRow> read_embeddings_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("embedding csv is empty", 0);
  const auto header = csv_row(lines[0], 1);
  if (header.size() < 3 || header[0] != "id" || header[1] != "pattern" || header[2] != "category") {
    throw SchemaError("embedding csv header must start with id,pattern,category");
  }
  std::vector<EmbeddingRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto f = csv_row(lines[n], n + 1);
    if (f.size() != header.size()) {
      throw ParseError(fmt::format("embedding csv line {}: {} fields, header has {}", n + 1, f.size(), header.size()),
                       n + 1);
    }
    EmbeddingRow row{f[0], f[1], f[2], {}};
    for (std::size_t j = 3; j < f.size(); ++j) row.vector.push_back(std::stod(f[j]));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<llm::Demonstration> parse_demonstrations(std::string_view jsonl) {
  std::vector<llm::Demonstration> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(jsonl)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ParseError(fmt::format("demonstration line {}: not a JSON object", line_no), line_no);
    }
    try {
      llm::Demonstration d;
      d.question = j.at("question").get<std::string>();
      d.answers = j.at("answers").get<std::vector<std::string>>();
      if (j.contains("rationale") && !j["rationale"].is_null()) d.rationale = j["rationale"].get<std::string>();
      d.pattern = j.value("pattern", "");
      d.category = j.value("category", "");
      d.id = j.value("id", "");
      if (d.answers.empty()) throw ValidationError("no answers");
      out.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("demonstration line {}: {}", line_no, e.what()), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("demonstration line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

std::vector<llm::Demonstration> load_demonstrations(const std::filesystem::path& path) {
  return parse_demonstrations(read_file(path));
}

std::string demonstrations_to_jsonl(const std::vector<llm::Demonstration>& demos) {
  std::string out;
  for (const auto& d : demos) {
    nlohmann::ordered_json j;
    if (!d.id.empty()) j["id"] = d.id;
    j["question"] = d.question;
    j["answers"] = d.answers;
    if (d.rationale) j["rationale"] = *d.rationale;
    if (!d.pattern.empty()) j["pattern"] = d.pattern;
    if (!d.category.empty()) j["category"] = d.category;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace kgforge::demo
