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


// Synthetic graphs shared by the tests, the acceptance suite and the
// fixture tool.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgforge/kg_store.hpp"
#include "kgforge/query_ast.hpp"
#include "kgforge/query_engine.hpp"
#include "kgforge/question_gen.hpp"
#include "kgforge/util.hpp"

namespace kgforge::testing {

/// Entities fall into `groups` blocks of `group_size`. Relation r links each
/// head in block g to each tail in block (g + offset_r) mod groups with
/// probability `density`.
struct FixtureSpec {
  std::size_t groups = 5;
  std::size_t group_size = 100;
  double density = 0.5;
  std::uint64_t seed = 7;
};

struct FixtureRelation {
  std::string name;
  std::size_t offset;
  std::string phrase;  // template text between the category clause and [HEAD]
};

const std::vector<FixtureRelation>& fixture_relations();

/// Pronounceable, distinct, and free of the letters q, x, z, j, w and y.
std::string fixture_entity_name(std::size_t index);

std::string fixture_tsv(const FixtureSpec& spec = {});
std::string fixture_templates_tsv();
kg::KnowledgeGraph fixture_graph(const FixtureSpec& spec = {});
qgen::TemplateSet fixture_templates();

/// Random graph with 1..max_entities entities and 1..max_relations relations.
/// Every relation carries at least one triple.
kg::KnowledgeGraph random_graph(Rng& rng, std::size_t max_entities, std::size_t max_relations, double density);

/// Uniform relation and anchor per slot, no answerability filter.
query::GroundedQuery random_grounding(Rng& rng, const kg::KnowledgeGraph& kg, const query::QueryTypeTree& tree);

/// Random tree in which n only appears as the left child of an i.
query::QueryTypeTree random_tree(Rng& rng, int budget);

}  // namespace kgforge::testing
