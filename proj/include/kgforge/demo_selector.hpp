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

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/common.hpp"
#include "kgforge/llm_gateway.hpp"
#include "kgforge/util.hpp"

namespace kgforge::demo {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Must be deterministic per text. May throw on provider failure.
  virtual std::vector<double> embed(std::string_view text) = 0;
};

/// Offline embedder: signed feature hashing of character trigrams of the
/// case-folded text, L2-normalized.
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256, std::size_t ngram = 3);
  std::string id() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) override;

 private:
  std::size_t dimension_;
  std::size_t ngram_;
};

struct HttpEmbeddingConfig {
  std::string endpoint = "https://api.openai.com/v1/embeddings";
  std::string model = "text-embedding-ada-002";
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t dimension = 1536;
  std::chrono::milliseconds timeout{60'000};
};

/// Remote embedder speaking the {model, input} -> data[0].embedding format.
/// Shares the gateway's rate limiter. Throws Error on any failure.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(HttpEmbeddingConfig config, std::shared_ptr<llm::RateLimiter> limiter);
  std::string id() const override { return "http:" + config_.model; }
  std::size_t dimension() const override { return config_.dimension; }
  std::vector<double> embed(std::string_view text) override;

 private:
  HttpEmbeddingConfig config_;
  std::shared_ptr<llm::RateLimiter> limiter_;
  std::string api_key_;
};

/// Content-addressed vector files: <dir>/<sha256(provider id, text)>.vec.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);
  std::optional<std::vector<double>> get(std::string_view provider_id, std::string_view text) const;
  void put(std::string_view provider_id, std::string_view text, const std::vector<double>& vec) const;
  std::filesystem::path path_for(std::string_view provider_id, std::string_view text) const;

 private:
  std::filesystem::path dir_;
};

struct PoolEntry {
  llm::Demonstration demo;
  std::vector<double> vector;
  double norm = 0.0;
};

class DemoPool {
 public:
  DemoPool(std::string provider_id, std::size_t dimension) : provider_id_(std::move(provider_id)), dimension_(dimension) {}

  /// Throws ValidationError on a dimension mismatch.
  void add(llm::Demonstration demo, std::vector<double> vec);

  const std::string& provider_id() const { return provider_id_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }

  /// Row-major copy of the vectors and their norms for the scan kernels.
  const std::vector<double>& matrix() const { return matrix_; }
  const std::vector<double>& norms() const { return norms_; }

 private:
  std::string provider_id_;
  std::size_t dimension_;
  std::vector<PoolEntry> entries_;
  std::vector<double> matrix_;
  std::vector<double> norms_;
};

class PartialPoolError : public Error {
 public:
  PartialPoolError(DemoPool partial, std::vector<std::string> failures);
  const DemoPool& partial() const { return partial_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  DemoPool partial_;
  std::vector<std::string> failures_;
};

struct BuildStats {
  std::size_t provider_calls = 0;
  std::size_t cache_hits = 0;
};

/// One vector per question, through `cache` when given. A vector of the wrong
/// size throws ValidationError at once; provider exceptions are collected and
/// reported together as PartialPoolError.
DemoPool build_pool(const std::vector<llm::Demonstration>& questions, EmbeddingProvider& provider,
                    const EmbeddingCache* cache = nullptr, BuildStats* stats = nullptr);

enum class Strategy { kFixed, kHighest, kRandom, kLowest };

Strategy parse_strategy(std::string_view text);
std::string_view strategy_name(Strategy strategy);

/// 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

/// Pool indices chosen for a target. Entries whose question equals the
/// target text are never candidates. fixed: first k in pool order; highest /
/// lowest: by cosine, ties in pool order; random: uniform without
/// replacement. Throws ContractViolation when k exceeds the candidates.
std::vector<std::size_t> select_indices(const DemoPool& pool, std::string_view target_text,
                                        std::span<const double> target_vector, std::size_t k,
                                        Strategy strategy, Rng& rng);

std::vector<llm::Demonstration> select(const DemoPool& pool, EmbeddingProvider& provider,
                                       std::string_view target_text, std::size_t k, Strategy strategy,
                                       Rng& rng);

/// CSV with header "id,pattern,category,v0,...". Components use %.17g.
void export_embeddings(const DemoPool& pool, const std::filesystem::path& path);

struct EmbeddingRow {
  std::string id;
  std::string pattern;
  std::string category;
  std::vector<double> vector;
};

std::vector<EmbeddingRow> read_embeddings_csv(const std::filesystem::path& path);

/// JSON-lines demonstration records: {"question", "answers", "rationale"?,
/// "pattern"?, "category"?, "id"?}.
std::vector<llm::Demonstration> parse_demonstrations(std::string_view jsonl);
std::vector<llm::Demonstration> load_demonstrations(const std::filesystem::path& path);
std::string demonstrations_to_jsonl(const std::vector<llm::Demonstration>& demos);

}  // namespace kgforge::demo
