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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgforge/kg_store.hpp"
#include "kgforge/query_ast.hpp"
#include "kgforge/query_engine.hpp"
#include "kgforge/util.hpp"

namespace kgforge::sampler {

struct SamplerConfig {
  std::size_t min_answers = 10;
  std::size_t max_answers = 200;
  std::size_t max_retries_per_question = 500;
  std::uint64_t seed = 0;
  std::size_t questions_per_pattern = 100;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

struct Grounding {
  query::GroundedQuery query;
  EntityId seed_vertex{};
};

struct SampledQuery {
  query::GroundedQuery query;
  EntityId seed_vertex{};
  query::AnswerSet gold;
  std::size_t pattern_index = 0;
};

class GroundingFailure : public Error {
 public:
  using Error::Error;
};

struct Shortfall {
  std::string formula;
  std::size_t produced = 0;
  std::size_t requested = 0;
};

/// Sampling stopped short of the quota for at least one pattern. Whatever was
/// produced is kept in `partial`.
class SamplingShortfall : public Error {
 public:
  SamplingShortfall(std::vector<SampledQuery> partial, std::vector<Shortfall> shortfalls);
  const std::vector<SampledQuery>& partial() const { return partial_; }
  const std::vector<Shortfall>& shortfalls() const { return shortfalls_; }

 private:
  std::vector<SampledQuery> partial_;
  std::vector<Shortfall> shortfalls_;
};

/// One reverse-grounding attempt that treats `seed` as an answer. Returns
/// nullopt on a dead end (a vertex with no incoming edge) or when a negated
/// branch would exclude the vertex its positive sibling was grounded on.
std::optional<query::GroundedQuery> try_ground_at(const kg::KnowledgeGraph& kg,
                                                  const query::QueryTypeTree& pattern,
                                                  EntityId seed, Rng& rng);

/// Samples seed vertices until an attempt succeeds. Throws GroundingFailure
/// after `max_attempts` failures.
Grounding ground(const kg::KnowledgeGraph& kg, const query::QueryTypeTree& pattern, Rng& rng,
                 std::size_t max_attempts = 500);

/// `questions_per_pattern` distinct groundings per catalog entry, each with
/// a gold-set size inside [min_answers, max_answers]. Pattern i draws from
/// its own stream seeded with `seed ^ i`, so the output does not depend on
/// how patterns are scheduled across threads.
std::vector<SampledQuery> sample_benchmark(const kg::KnowledgeGraph& kg,
                                           const std::vector<query::PatternCatalogEntry>& catalog,
                                           const SamplerConfig& config);

}  // namespace kgforge::sampler
