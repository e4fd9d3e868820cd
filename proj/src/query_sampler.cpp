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

#include "kgforge/query_sampler.hpp"

#include <exception>
#include <unordered_set>

namespace kgforge::sampler {

using query::GroundedNode;
using query::NodeKind;
using query::QueryTypeTree;

void SamplerConfig::validate() const {
  if (min_answers < 1) throw ConfigError("min-answers must be at least 1");
  if (min_answers > max_answers) throw ConfigError("min-answers must not exceed max-answers");
  if (max_retries_per_question < 1) throw ConfigError("max-retries-per-question must be at least 1");
}

SamplingShortfall::SamplingShortfall(std::vector<SampledQuery> partial,
                                     std::vector<Shortfall> shortfalls)
    : Error([&] {
        std::string msg = "sampling quota not reached:";
        for (const auto& s : shortfalls) {
          msg += " " + s.formula + " " + std::to_string(s.produced) + "/" +
                 std::to_string(s.requested) + ";";
        }
        return msg;
      }()),
      partial_(std::move(partial)),
      shortfalls_(std::move(shortfalls)) {}

namespace {

EntityId random_entity(const kg::KnowledgeGraph& kg, Rng& rng) {
  return EntityId{static_cast<std::uint32_t>(uniform_index(rng, kg.entity_count()))};
}

class Grounder {
 public:
  Grounder(const kg::KnowledgeGraph& kg, Rng& rng) : kg_(kg), rng_(rng) {}

  std::optional<GroundedNode> ground(const QueryTypeTree& node, EntityId v) {
    switch (node.kind) {
      case NodeKind::kEntity:
        return query::ground_leaf(v);

      case NodeKind::kProjection: {
        auto in = kg_.in_edges(v);
        if (in.empty()) return std::nullopt;
        const kg::Edge edge = in[uniform_index(rng_, in.size())];
        auto child = ground(node.children[0], edge.other);
        if (!child) return std::nullopt;
        return query::ground_projection(edge.relation, std::move(*child));
      }

      case NodeKind::kIntersection:
        return ground_intersection(node, v);

      case NodeKind::kUnion: {
        // The first operand keeps the answer vertex; later operands start
        // from fresh vertices so the union is not two views of one entity.
        auto left = ground(node.children[0], v);
        if (!left) return std::nullopt;
        auto right = ground(node.children[1], random_entity(kg_, rng_));
        if (!right) return std::nullopt;
        return query::ground_union(std::move(*left), std::move(*right));
      }

      case NodeKind::kNegation:
        break;
    }
    throw GroundingFailure("negation must be a direct child of an intersection");
  }

 private:
  std::optional<GroundedNode> ground_intersection(const QueryTypeTree& node, EntityId v) {
    std::vector<GroundedNode> children(node.children.size());
    // Positive operands first, all on v.
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (node.children[i].kind == NodeKind::kNegation) continue;
      auto child = ground(node.children[i], v);
      if (!child) return std::nullopt;
      children[i] = std::move(*child);
    }
    // Negated operands from independent vertices; v must survive the
    // difference so the intersection stays non-empty.
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (node.children[i].kind != NodeKind::kNegation) continue;
      const QueryTypeTree& operand = node.children[i].children[0];
      auto grounded = ground(operand, random_entity(kg_, rng_));
      if (!grounded) return std::nullopt;
      if (query::answer(kg_, query::GroundedQuery(*grounded)).contains(v)) return std::nullopt;
      children[i] = query::ground_negation(std::move(*grounded));
    }
    return query::ground_intersection(std::move(children[0]), std::move(children[1]));
  }

  const kg::KnowledgeGraph& kg_;
  Rng& rng_;
};

}  // namespace

std::optional<query::GroundedQuery> try_ground_at(const kg::KnowledgeGraph& kg,
                                                  const QueryTypeTree& pattern, EntityId seed,
                                                  Rng& rng) {
  (void)kg.entity(seed);
  auto root = Grounder(kg, rng).ground(pattern, seed);
  if (!root) return std::nullopt;
  return query::GroundedQuery(std::move(*root));
}

Grounding ground(const kg::KnowledgeGraph& kg, const QueryTypeTree& pattern, Rng& rng,
                 std::size_t max_attempts) {
  if (kg.entity_count() == 0) throw GroundingFailure("cannot ground over an empty graph");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const EntityId seed = random_entity(kg, rng);
    if (auto q = try_ground_at(kg, pattern, seed, rng)) return Grounding{std::move(*q), seed};
  }
  throw GroundingFailure("no grounding of " + query::serialize(pattern) + " after " +
                         std::to_string(max_attempts) + " attempts");
}

namespace {

struct PatternOutcome {
  std::vector<SampledQuery> queries;
  std::exception_ptr error;
};

PatternOutcome sample_pattern(const kg::KnowledgeGraph& kg, const query::PatternCatalogEntry& entry,
                              std::size_t pattern_index, const SamplerConfig& config) {
  PatternOutcome out;
  Rng rng(config.seed ^ static_cast<std::uint64_t>(pattern_index));
  std::unordered_set<std::string> seen;
  std::size_t retries_left = config.max_retries_per_question;
  while (out.queries.size() < config.questions_per_pattern && retries_left > 0) {
    const EntityId seed = random_entity(kg, rng);
    auto grounded = try_ground_at(kg, entry.tree, seed, rng);
    if (!grounded) {
      --retries_left;
      continue;
    }
    query::AnswerSet gold = query::answer(kg, *grounded);
    if (gold.size() < config.min_answers || gold.size() > config.max_answers ||
        !seen.insert(grounded->dedup_key(kg)).second) {
      --retries_left;
      continue;
    }
    out.queries.push_back(SampledQuery{std::move(*grounded), seed, std::move(gold), pattern_index});
    retries_left = config.max_retries_per_question;
  }
  return out;
}

}  // namespace

std::vector<SampledQuery> sample_benchmark(const kg::KnowledgeGraph& kg,
                                           const std::vector<query::PatternCatalogEntry>& catalog,
                                           const SamplerConfig& config) {
  config.validate();
  if (catalog.empty()) throw ContractViolation("sample_benchmark: empty catalog");
  std::vector<PatternOutcome> outcomes(catalog.size());
  if (kg.entity_count() > 0) {
    const auto n = static_cast<std::ptrdiff_t>(catalog.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        outcomes[i] = sample_pattern(kg, catalog[i], static_cast<std::size_t>(i), config);
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
    }
  }

  std::vector<SampledQuery> all;
  std::vector<Shortfall> shortfalls;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error) std::rethrow_exception(outcomes[i].error);
    if (outcomes[i].queries.size() < config.questions_per_pattern) {
      shortfalls.push_back(
          Shortfall{catalog[i].formula, outcomes[i].queries.size(), config.questions_per_pattern});
    }
    for (auto& q : outcomes[i].queries) all.push_back(std::move(q));
  }
  if (!shortfalls.empty()) throw SamplingShortfall(std::move(all), std::move(shortfalls));
  return all;
}

}  // namespace kgforge::sampler
