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

#include "kgforge/query_engine.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_set>

namespace kgforge::query {

AnswerSet::AnswerSet(std::initializer_list<EntityId> ids)
    : AnswerSet(from_unsorted(std::vector<EntityId>(ids))) {}

AnswerSet AnswerSet::from_unsorted(std::vector<EntityId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  AnswerSet s;
  s.ids_ = std::move(ids);
  return s;
}

bool AnswerSet::contains(EntityId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

AnswerSet set_union(const AnswerSet& a, const AnswerSet& b) {
  std::vector<EntityId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return AnswerSet::from_unsorted(std::move(out));
}

AnswerSet set_intersection(const AnswerSet& a, const AnswerSet& b) {
  std::vector<EntityId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return AnswerSet::from_unsorted(std::move(out));
}

AnswerSet set_difference(const AnswerSet& a, const AnswerSet& b) {
  std::vector<EntityId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return AnswerSet::from_unsorted(std::move(out));
}

bool is_subset(const AnswerSet& sub, const AnswerSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

GroundedNode ground_leaf(EntityId anchor) {
  GroundedNode n;
  n.kind = NodeKind::kEntity;
  n.anchor = anchor;
  return n;
}

GroundedNode ground_projection(RelationId relation, GroundedNode child) {
  GroundedNode n;
  n.kind = NodeKind::kProjection;
  n.relation = relation;
  n.children.push_back(std::move(child));
  return n;
}

GroundedNode ground_intersection(GroundedNode left, GroundedNode right) {
  GroundedNode n;
  n.kind = NodeKind::kIntersection;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

GroundedNode ground_union(GroundedNode left, GroundedNode right) {
  GroundedNode n;
  n.kind = NodeKind::kUnion;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

GroundedNode ground_negation(GroundedNode child) {
  GroundedNode n;
  n.kind = NodeKind::kNegation;
  n.children.push_back(std::move(child));
  return n;
}

namespace {

GroundedNode bind(const QueryTypeTree& tree, const std::vector<RelationId>& relations,
                  const std::vector<EntityId>& anchors, std::size_t& next_relation,
                  std::size_t& next_anchor) {
  GroundedNode node;
  node.kind = tree.kind;
  if (tree.kind == NodeKind::kProjection) {
    if (next_relation >= relations.size()) throw ContractViolation("too few relation bindings");
    node.relation = relations[next_relation++];
  } else if (tree.kind == NodeKind::kEntity) {
    if (next_anchor >= anchors.size()) throw ContractViolation("too few anchor bindings");
    node.anchor = anchors[next_anchor++];
  }
  for (const auto& child : tree.children) {
    node.children.push_back(bind(child, relations, anchors, next_relation, next_anchor));
  }
  return node;
}

QueryTypeTree shape_of(const GroundedNode& node) {
  QueryTypeTree tree{node.kind, {}};
  for (const auto& child : node.children) tree.children.push_back(shape_of(child));
  return tree;
}

template <typename Fn>
void preorder(const GroundedNode& node, Fn&& fn) {
  fn(node);
  for (const auto& child : node.children) preorder(child, fn);
}

}  // namespace

GroundedQuery GroundedQuery::from_bindings(const QueryTypeTree& tree,
                                           const std::vector<RelationId>& relations,
                                           const std::vector<EntityId>& anchors) {
  std::size_t r = 0, a = 0;
  GroundedNode root = bind(tree, relations, anchors, r, a);
  if (r != relations.size() || a != anchors.size()) {
    throw ContractViolation("binding count mismatch for " + serialize(tree));
  }
  return GroundedQuery(std::move(root));
}

QueryTypeTree GroundedQuery::shape() const { return shape_of(root_); }

std::vector<RelationId> GroundedQuery::relations() const {
  std::vector<RelationId> out;
  preorder(root_, [&](const GroundedNode& n) {
    if (n.kind == NodeKind::kProjection) out.push_back(n.relation);
  });
  return out;
}

std::vector<EntityId> GroundedQuery::anchors() const {
  std::vector<EntityId> out;
  preorder(root_, [&](const GroundedNode& n) {
    if (n.kind == NodeKind::kEntity) out.push_back(n.anchor);
  });
  return out;
}

void GroundedQuery::validate(const kg::KnowledgeGraph& kg) const {
  preorder(root_, [&](const GroundedNode& n) {
    if (n.children.size() != arity(n.kind)) {
      throw ContractViolation("malformed grounded node '" + std::string(1, symbol(n.kind)) + "'");
    }
    if (n.kind == NodeKind::kProjection) (void)kg.relation(n.relation);
    if (n.kind == NodeKind::kEntity) (void)kg.entity(n.anchor);
  });
}

std::string GroundedQuery::dedup_key(const kg::KnowledgeGraph& kg) const {
  std::string key = formula();
  key.push_back('\x1f');
  for (RelationId r : relations()) {
    key += kg.relation(r).name;
    key.push_back('\x1e');
  }
  key.push_back('\x1f');
  for (EntityId e : anchors()) {
    key += kg.entity(e).name;
    key.push_back('\x1e');
  }
  return key;
}

namespace {

AnswerSet project_set(const kg::KnowledgeGraph& kg, const AnswerSet& from, RelationId relation) {
  std::vector<EntityId> out;
  for (EntityId v : from) {
    auto edges = kg.out_edges(v);
    auto it = std::lower_bound(edges.begin(), edges.end(), kg::Edge{relation, EntityId{0}});
    for (; it != edges.end() && it->relation == relation; ++it) out.push_back(it->other);
  }
  return AnswerSet::from_unsorted(std::move(out));
}

class Evaluator {
 public:
  Evaluator(const kg::KnowledgeGraph& kg, std::vector<AnswerSet>* trace) : kg_(kg), trace_(trace) {}

  AnswerSet eval(const GroundedNode& node) {
    const std::size_t slot = next_slot_++;
    if (trace_) trace_->emplace_back();
    AnswerSet result;
    switch (node.kind) {
      case NodeKind::kEntity:
        (void)kg_.entity(node.anchor);
        result = AnswerSet{node.anchor};
        break;
      case NodeKind::kProjection:
        (void)kg_.relation(node.relation);
        result = project_set(kg_, eval(node.children.at(0)), node.relation);
        break;
      case NodeKind::kUnion: {
        // sequenced so trace slots stay in pre-order
        AnswerSet left = eval(node.children.at(0));
        result = set_union(left, eval(node.children.at(1)));
        break;
      }
      case NodeKind::kIntersection:
        result = intersection(node);
        break;
      case NodeKind::kNegation:
        throw EvaluationError("negation outside an intersection would need a complement over all entities");
    }
    if (trace_) (*trace_)[slot] = result;
    return result;
  }

 private:
  AnswerSet intersection(const GroundedNode& node) {
    std::vector<AnswerSet> positive;
    std::vector<AnswerSet> negative;
    for (const auto& child : node.children) {
      if (child.kind == NodeKind::kNegation) {
        const std::size_t slot = next_slot_++;
        if (trace_) trace_->emplace_back();
        AnswerSet operand = eval(child.children.at(0));
        if (trace_) (*trace_)[slot] = operand;
        negative.push_back(std::move(operand));
      } else {
        positive.push_back(eval(child));
      }
    }
    if (positive.empty()) {
      throw EvaluationError("intersection of negations only would need a complement over all entities");
    }
    AnswerSet result = positive[0];
    for (std::size_t i = 1; i < positive.size(); ++i) result = set_intersection(result, positive[i]);
    for (const auto& excluded : negative) result = set_difference(result, excluded);
    return result;
  }

  const kg::KnowledgeGraph& kg_;
  std::vector<AnswerSet>* trace_;
  std::size_t next_slot_ = 0;
};

}  // namespace

AnswerSet answer(const kg::KnowledgeGraph& kg, const GroundedQuery& query) {
  return Evaluator(kg, nullptr).eval(query.root());
}

std::vector<AnswerSet> subquery_answers(const kg::KnowledgeGraph& kg, const GroundedQuery& query) {
  std::vector<AnswerSet> trace;
  Evaluator(kg, &trace).eval(query.root());
  return trace;
}

namespace {

// Decides "v satisfies node" for every (node, v) by exhaustive existential
// search. Results are memoized per (node, candidate) pair.
class NaiveOracle {
 public:
  explicit NaiveOracle(const kg::KnowledgeGraph& kg) : kg_(kg), n_(kg.entity_count()) {
    for (const auto& t : kg.triples()) atoms_.insert(t);
  }

  bool satisfies(const GroundedNode& node, EntityId v) {
    auto& memo = memo_for(node);
    auto& cell = memo[index_of(v)];
    if (cell != kUnknown) return cell == kTrue;
    const bool result = decide(node, v);
    cell = result ? kTrue : kFalse;
    return result;
  }

 private:
  static constexpr char kUnknown = 0, kTrue = 1, kFalse = 2;

  std::vector<char>& memo_for(const GroundedNode& node) {
    auto [it, inserted] = memo_.try_emplace(&node);
    if (inserted) it->second.assign(n_, kUnknown);
    return it->second;
  }

  bool decide(const GroundedNode& node, EntityId v) {
    switch (node.kind) {
      case NodeKind::kEntity:
        return v == node.anchor;
      case NodeKind::kProjection:
        // exists u: r(u, v) and u satisfies the child
        for (std::uint32_t u = 0; u < n_; ++u) {
          if (atoms_.count(kg::Triple{EntityId{u}, node.relation, v}) &&
              satisfies(node.children[0], EntityId{u})) {
            return true;
          }
        }
        return false;
      case NodeKind::kUnion:
        return satisfies(node.children[0], v) || satisfies(node.children[1], v);
      case NodeKind::kIntersection: {
        bool any_positive = false;
        bool all = true;
        for (const auto& child : node.children) {
          if (child.kind == NodeKind::kNegation) {
            all = all && !satisfies(child.children[0], v);
          } else {
            any_positive = true;
            all = all && satisfies(child, v);
          }
        }
        if (!any_positive) throw EvaluationError("intersection of negations only is refused");
        return all;
      }
      case NodeKind::kNegation:
        throw EvaluationError("standalone negation is refused");
    }
    return false;
  }

  const kg::KnowledgeGraph& kg_;
  std::uint32_t n_;
  std::unordered_set<kg::Triple, kg::TripleHash> atoms_;
  std::unordered_map<const GroundedNode*, std::vector<char>> memo_;
};

void check_negation_placement(const GroundedNode& node, bool parent_is_intersection) {
  if (node.kind == NodeKind::kNegation && !parent_is_intersection) {
    throw EvaluationError("standalone negation is refused");
  }
  for (const auto& child : node.children) {
    check_negation_placement(child, node.kind == NodeKind::kIntersection);
  }
}

}  // namespace

AnswerSet answer_naive(const kg::KnowledgeGraph& kg, const GroundedQuery& query,
                       std::size_t entity_cap) {
  if (kg.entity_count() > entity_cap) {
    throw EvaluationError("naive oracle refused: " + std::to_string(kg.entity_count()) +
                          " entities exceeds cap " + std::to_string(entity_cap));
  }
  query.validate(kg);
  check_negation_placement(query.root(), false);
  NaiveOracle oracle(kg);
  std::vector<EntityId> members;
  for (std::uint32_t v = 0; v < kg.entity_count(); ++v) {
    if (oracle.satisfies(query.root(), EntityId{v})) members.push_back(EntityId{v});
  }
  return AnswerSet::from_unsorted(std::move(members));
}

}  // namespace kgforge::query
