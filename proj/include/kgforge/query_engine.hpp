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
#include <initializer_list>
#include <string>
#include <vector>

#include "kgforge/common.hpp"
#include "kgforge/kg_store.hpp"
#include "kgforge/query_ast.hpp"

namespace kgforge::query {

/// Sorted, duplicate-free set of entity ids.
class AnswerSet {
 public:
  AnswerSet() = default;
  AnswerSet(std::initializer_list<EntityId> ids);
  /// Sorts and deduplicates.
  static AnswerSet from_unsorted(std::vector<EntityId> ids);

  const std::vector<EntityId>& entities() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(EntityId id) const;

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;

 private:
  std::vector<EntityId> ids_;
};

AnswerSet set_union(const AnswerSet& a, const AnswerSet& b);
AnswerSet set_intersection(const AnswerSet& a, const AnswerSet& b);
AnswerSet set_difference(const AnswerSet& a, const AnswerSet& b);
bool is_subset(const AnswerSet& sub, const AnswerSet& super);

/// A pattern node with its bindings: p nodes carry a relation, e leaves an
/// anchor entity. Other node kinds leave both at their defaults.
struct GroundedNode {
  NodeKind kind = NodeKind::kEntity;
  RelationId relation{};
  EntityId anchor{};
  std::vector<GroundedNode> children;

  friend bool operator==(const GroundedNode&, const GroundedNode&) = default;
};

class GroundedQuery {
 public:
  GroundedQuery() = default;
  explicit GroundedQuery(GroundedNode root) : root_(std::move(root)) {}

  /// Binds `tree` from parallel arrays: relations for p nodes and anchors for
  /// e leaves, each in pre-order. Throws ContractViolation on a count mismatch.
  static GroundedQuery from_bindings(const QueryTypeTree& tree,
                                     const std::vector<RelationId>& relations,
                                     const std::vector<EntityId>& anchors);

  const GroundedNode& root() const { return root_; }
  QueryTypeTree shape() const;
  std::string formula() const { return serialize(shape()); }
  std::vector<RelationId> relations() const;
  std::vector<EntityId> anchors() const;

  /// Throws ContractViolation when a binding is not a valid id of `kg`.
  void validate(const kg::KnowledgeGraph& kg) const;

  /// Distinctness key: formula, relation names and anchor names in pre-order.
  std::string dedup_key(const kg::KnowledgeGraph& kg) const;

  friend bool operator==(const GroundedQuery&, const GroundedQuery&) = default;

 private:
  GroundedNode root_;
};

GroundedNode ground_leaf(EntityId anchor);
GroundedNode ground_projection(RelationId relation, GroundedNode child);
GroundedNode ground_intersection(GroundedNode left, GroundedNode right);
GroundedNode ground_union(GroundedNode left, GroundedNode right);
GroundedNode ground_negation(GroundedNode child);

/// Exact answer by recursive set evaluation. Negation is only accepted as a
/// direct child of an intersection, where it becomes a set difference.
AnswerSet answer(const kg::KnowledgeGraph& kg, const GroundedQuery& query);

/// Answer of every node, indexed by pre-order position. A negation node's
/// entry holds its operand's (positive) answer.
std::vector<AnswerSet> subquery_answers(const kg::KnowledgeGraph& kg, const GroundedQuery& query);

inline constexpr std::size_t kDefaultNaiveEntityCap = 10'000;

/// Membership oracle: tests every entity as the target variable against the
/// formula, searching existential variables over all entities and checking
/// atoms against the raw triple list. Independent of the adjacency indices.
AnswerSet answer_naive(const kg::KnowledgeGraph& kg, const GroundedQuery& query,
                       std::size_t entity_cap = kDefaultNaiveEntityCap);

}  // namespace kgforge::query
