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

#include <set>

#include "kgforge/kg_store.hpp"
#include "kgforge/query_engine.hpp"
#include "support/fixture.hpp"

namespace kgforge::query {
namespace {

// a-r->b, a-r->c, b-s->d, c-s->d
kg::KnowledgeGraph toy() { return kg::parse_triples("a\tr\tb\na\tr\tc\nb\ts\td\nc\ts\td\n", {}); }

EntityId ent(const kg::KnowledgeGraph& kg, std::string_view n) { return *kg.find_entity(n); }
RelationId rel(const kg::KnowledgeGraph& kg, std::string_view n) { return *kg.find_relation(n); }

std::set<std::string> names(const kg::KnowledgeGraph& kg, const AnswerSet& s) {
  std::set<std::string> out;
  for (EntityId e : s) out.insert(kg.entity(e).name);
  return out;
}

// Pre-order walk that recomputes each node from the recorded child slots.
std::size_t recompose(const GroundedNode& node, const std::vector<AnswerSet>& trace, std::size_t slot,
                      const kg::KnowledgeGraph& kg) {
  const AnswerSet& mine = trace.at(slot);
  std::size_t next = slot + 1;
  std::vector<std::size_t> child_slots;
  for (const auto& c : node.children) {
    child_slots.push_back(next);
    next = recompose(c, trace, next, kg);
  }
  switch (node.kind) {
    case NodeKind::kEntity:
      EXPECT_EQ(mine, AnswerSet{node.anchor}) << "slot " << slot << " size " << mine.size();
      break;
    case NodeKind::kProjection: {
      std::vector<EntityId> out;
      for (EntityId v : trace[child_slots[0]]) {
        for (EntityId t : kg.neighbors(v, node.relation, kg::Direction::kForward)) out.push_back(t);
      }
      EXPECT_EQ(mine, AnswerSet::from_unsorted(out));
      break;
    }
    case NodeKind::kUnion:
      EXPECT_EQ(mine, set_union(trace[child_slots[0]], trace[child_slots[1]]));
      break;
    case NodeKind::kNegation:
      // the slot holds the operand's positive answer
      EXPECT_EQ(mine, trace[child_slots[0]]);
      break;
    case NodeKind::kIntersection: {
      const bool ln = node.children[0].kind == NodeKind::kNegation;
      const bool rn = node.children[1].kind == NodeKind::kNegation;
      const auto& l = trace[child_slots[0]];
      const auto& r = trace[child_slots[1]];
      if (ln) EXPECT_EQ(mine, set_difference(r, l));
      else if (rn) EXPECT_EQ(mine, set_difference(l, r));
      else EXPECT_EQ(mine, set_intersection(l, r));
      break;
    }
  }
  return next;
}

TEST(QueryEngine, SetAlgebra) {
  const AnswerSet a{EntityId{1}, EntityId{2}, EntityId{3}};
  const AnswerSet b{EntityId{3}, EntityId{4}};
  EXPECT_EQ(set_union(a, b).size(), 4u);
  EXPECT_EQ(set_intersection(a, b), AnswerSet{EntityId{3}});
  EXPECT_EQ(set_difference(a, b), (AnswerSet{EntityId{1}, EntityId{2}}));
  EXPECT_TRUE(is_subset(AnswerSet{EntityId{2}}, a));
  EXPECT_FALSE(is_subset(b, a));
  EXPECT_EQ(AnswerSet::from_unsorted({EntityId{5}, EntityId{1}, EntityId{5}}), (AnswerSet{EntityId{1}, EntityId{5}}));
}

TEST(QueryEngine, ToyTwoHop) {
  const auto kg = toy();
  const GroundedQuery q(ground_projection(rel(kg, "s"), ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "a")))));
  EXPECT_EQ(q.formula(), "(p,(p,(e)))");
  EXPECT_EQ(names(kg, answer(kg, q)), (std::set<std::string>{"d"}));
  EXPECT_EQ(answer_naive(kg, q), answer(kg, q));
}

TEST(QueryEngine, FromBindingsMatchesBuilders) {
  const auto kg = toy();
  const auto tree = parse_formula("(i,(n,(p,(e))),(p,(p,(e))))");
  const auto q = GroundedQuery::from_bindings(tree, {rel(kg, "s"), rel(kg, "s"), rel(kg, "r")},
                                              {ent(kg, "b"), ent(kg, "a")});
  EXPECT_EQ(q.shape(), tree);
  EXPECT_EQ(q.relations(), (std::vector<RelationId>{rel(kg, "s"), rel(kg, "s"), rel(kg, "r")}));
  EXPECT_EQ(q.anchors(), (std::vector<EntityId>{ent(kg, "b"), ent(kg, "a")}));
  EXPECT_THROW(GroundedQuery::from_bindings(tree, {rel(kg, "s")}, {ent(kg, "b"), ent(kg, "a")}), ContractViolation);
  // {d} \ {d}
  EXPECT_TRUE(answer(kg, q).empty());
}

TEST(QueryEngine, IntersectionIsIdempotent) {
  const auto kg = toy();
  const auto p = ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "a")));
  const GroundedQuery single(p);
  const GroundedQuery twice(ground_intersection(p, p));
  EXPECT_EQ(answer(kg, twice), answer(kg, single));
  EXPECT_EQ(answer(kg, GroundedQuery(ground_intersection(ground_negation(p), p))), AnswerSet{});
}

TEST(QueryEngine, StandaloneNegationIsRefused) {
  const auto kg = toy();
  const GroundedQuery q(ground_negation(ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "a")))));
  EXPECT_THROW(answer(kg, q), EvaluationError);
  EXPECT_THROW(answer_naive(kg, q), EvaluationError);
  const GroundedQuery under_union(
      ground_union(ground_negation(ground_leaf(ent(kg, "a"))), ground_leaf(ent(kg, "b"))));
  EXPECT_THROW(answer(kg, under_union), EvaluationError);
  EXPECT_THROW(answer_naive(kg, under_union), EvaluationError);
}

TEST(QueryEngine, LeafAndDeadEndAnswers) {
  const auto kg = toy();
  EXPECT_EQ(answer(kg, GroundedQuery(ground_leaf(ent(kg, "c")))), AnswerSet{ent(kg, "c")});
  EXPECT_EQ(answer_naive(kg, GroundedQuery(ground_leaf(ent(kg, "c")))), AnswerSet{ent(kg, "c")});
  // d has no outgoing triples, so every projection from it is empty
  const GroundedQuery dead(ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "d"))));
  EXPECT_TRUE(answer(kg, dead).empty());
  EXPECT_TRUE(answer_naive(kg, dead).empty());
}

TEST(QueryEngine, InvalidBindingsAreContractViolations) {
  const auto kg = toy();
  EXPECT_THROW(answer(kg, GroundedQuery(ground_leaf(EntityId{40}))), ContractViolation);
  EXPECT_THROW(answer(kg, GroundedQuery(ground_projection(RelationId{9}, ground_leaf(EntityId{0})))),
               ContractViolation);
  EXPECT_THROW(GroundedQuery(ground_leaf(EntityId{40})).validate(kg), ContractViolation);
}

TEST(QueryEngine, NaiveOracleRespectsCap) {
  const auto kg = toy();
  const GroundedQuery q(ground_leaf(EntityId{0}));
  EXPECT_THROW(answer_naive(kg, q, 3), EvaluationError);
  EXPECT_NO_THROW(answer_naive(kg, q, 4));
  EXPECT_EQ(kDefaultNaiveEntityCap, 10'000u);
}

TEST(QueryEngine, SubqueryAnswersOnIntersection) {
  const auto kg = toy();
  const auto p1 = ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "a")));
  const auto p2 = ground_projection(rel(kg, "s"), ground_leaf(ent(kg, "b")));
  const GroundedQuery q(ground_intersection(p1, p2));
  const auto trace = subquery_answers(kg, q);
  // i, p, e, p, e
  ASSERT_EQ(trace.size(), 5u);
  EXPECT_EQ(trace[0], answer(kg, q));
  EXPECT_EQ(names(kg, trace[1]), (std::set<std::string>{"b", "c"}));
  EXPECT_EQ(names(kg, trace[3]), (std::set<std::string>{"d"}));
  EXPECT_TRUE(trace[0].empty());
}

TEST(QueryEngine, DedupKeyUsesNames) {
  const auto kg = toy();
  const GroundedQuery a(ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "a"))));
  const GroundedQuery b(ground_projection(rel(kg, "r"), ground_leaf(ent(kg, "b"))));
  EXPECT_NE(a.dedup_key(kg), b.dedup_key(kg));
  EXPECT_EQ(a.dedup_key(kg), GroundedQuery(a).dedup_key(kg));
}

// Property: the engine agrees with the exhaustive oracle on every catalog
// pattern over random small graphs.
TEST(QueryEngineProperty, OracleEquivalence) {
  Rng rng(2024);
  const auto& cat = default_catalog();
  std::size_t nonempty = 0, total = 0;
  for (int g = 0; g < 24; ++g) {
    const double density = 0.05 + 0.25 * uniform_unit(rng);
    const auto kg = testing::random_graph(rng, 50, 4, density);
    for (int k = 0; k < 60; ++k) {
      const auto& entry = cat[(g * 60 + k) % cat.size()];
      const auto q = testing::random_grounding(rng, kg, entry.tree);
      const auto fast = answer(kg, q);
      ASSERT_EQ(fast, answer_naive(kg, q)) << entry.formula;
      ASSERT_EQ(fast, answer(kg, q));  // pure
      nonempty += !fast.empty();
      ++total;
    }
  }
  EXPECT_GE(total, 1000u);
  // make sure the comparison is not vacuous
  EXPECT_GT(nonempty, total / 4);
}

TEST(QueryEngineProperty, OracleEquivalenceOnRandomShapes) {
  Rng rng(77);
  for (int g = 0; g < 20; ++g) {
    const auto kg = testing::random_graph(rng, 25, 3, 0.15);
    for (int k = 0; k < 30; ++k) {
      auto tree = testing::random_tree(rng, 4);
      if (tree.kind == NodeKind::kEntity) tree = project(tree);
      const auto q = testing::random_grounding(rng, kg, tree);
      ASSERT_EQ(answer(kg, q), answer_naive(kg, q)) << serialize(tree);
    }
  }
}

TEST(QueryEngineProperty, Monotonicity) {
  Rng rng(31);
  const auto chain = parse_formula("(p,(p,(e)))");
  const auto hop = parse_formula("(p,(e))");
  for (int g = 0; g < 30; ++g) {
    const auto kg = testing::random_graph(rng, 40, 3, 0.1);
    for (int k = 0; k < 20; ++k) {
      const auto p1 = testing::random_grounding(rng, kg, uniform_index(rng, 2) ? chain : hop).root();
      const auto p2 = testing::random_grounding(rng, kg, uniform_index(rng, 2) ? chain : hop).root();
      const auto a1 = answer(kg, GroundedQuery(p1));
      ASSERT_TRUE(is_subset(a1, answer(kg, GroundedQuery(ground_union(p1, p2)))));
      ASSERT_TRUE(is_subset(answer(kg, GroundedQuery(ground_intersection(p1, p2))), a1));
    }
  }
}

TEST(QueryEngineProperty, DeMorganAtEvaluation) {
  Rng rng(37);
  const auto hop = parse_formula("(p,(e))");
  for (int g = 0; g < 30; ++g) {
    const auto kg = testing::random_graph(rng, 40, 3, 0.15);
    for (int k = 0; k < 20; ++k) {
      const auto p1 = testing::random_grounding(rng, kg, hop).root();
      const auto p2 = testing::random_grounding(rng, kg, hop).root();
      const auto p3 = testing::random_grounding(rng, kg, hop).root();
      const GroundedQuery q(ground_intersection(ground_negation(ground_union(p1, p2)), p3));
      const auto expected = set_difference(answer(kg, GroundedQuery(p3)),
                                           set_union(answer(kg, GroundedQuery(p1)), answer(kg, GroundedQuery(p2))));
      ASSERT_EQ(answer(kg, q), expected);
    }
  }
}

TEST(QueryEngineProperty, SubqueryAnswersCompose) {
  Rng rng(41);
  const auto& cat = default_catalog();
  for (int g = 0; g < 10; ++g) {
    const auto kg = testing::random_graph(rng, 30, 3, 0.2);
    for (const auto& entry : cat) {
      const auto q = testing::random_grounding(rng, kg, entry.tree);
      const auto trace = subquery_answers(kg, q);
      ASSERT_EQ(trace.size(), node_count(entry.tree));
      ASSERT_EQ(trace[0], answer(kg, q));
      ASSERT_EQ(recompose(q.root(), trace, 0, kg), trace.size()) << entry.formula;
    }
  }
}

}  // namespace
}  // namespace kgforge::query
