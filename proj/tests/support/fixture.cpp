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


#include "fixture.hpp"

#include <fmt/format.h>

namespace kgforge::testing {

const std::vector<FixtureRelation>& fixture_relations() {
  static const std::vector<FixtureRelation> rels = {
      {"advised_by", 1, "is advised by the member"},
      {"trades_with", 2, "trades with the member"},
      {"borders", 0, "shares a border with the member"},
      {"visited_by", 3, "is visited by the member"},
      {"funded_by", 1, "receives funding from the member"},
      {"mentored_by", 4, "was mentored by the member"},
  };
  return rels;
}

namespace {

constexpr std::string_view kConsonants = "bdfghklmnprstv";
constexpr std::string_view kVowels = "aeiou";

std::string syllable(std::size_t i) {
  return {kConsonants[i / kVowels.size() % kConsonants.size()], kVowels[i % kVowels.size()]};
}

std::string capitalized(std::string s) {
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

template <typename Emit>
void for_each_fixture_triple(const FixtureSpec& spec, Emit&& emit) {
  Rng rng(spec.seed);
  const auto& rels = fixture_relations();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    for (std::size_t g = 0; g < spec.groups; ++g) {
      const std::size_t target = (g + rels[r].offset) % spec.groups;
      for (std::size_t h = 0; h < spec.group_size; ++h) {
        for (std::size_t t = 0; t < spec.group_size; ++t) {
          if (uniform_unit(rng) < spec.density) {
            emit(g * spec.group_size + h, rels[r].name, target * spec.group_size + t);
          }
        }
      }
    }
  }
}

}  // namespace

std::string fixture_entity_name(std::size_t index) {
  constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();  // 70
  const std::size_t idx = (index * 7919) % (kSyllables * kSyllables);
  const std::size_t a = idx / kSyllables, b = idx % kSyllables;
  return capitalized(syllable(a) + syllable(b)) + " " +
         capitalized(syllable((b * 11 + a * 3) % kSyllables) + syllable((a + b) % kSyllables) + "n");
}

std::string fixture_tsv(const FixtureSpec& spec) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < spec.groups * spec.group_size; ++i) names.push_back(fixture_entity_name(i));
  std::string out;
  for_each_fixture_triple(spec, [&](std::size_t h, const std::string& r, std::size_t t) {
    out += names[h];
    out += '\t';
    out += r;
    out += '\t';
    out += names[t];
    out += '\n';
  });
  return out;
}

std::string fixture_templates_tsv() {
  std::string out;
  for (const auto& r : fixture_relations()) {
    out += fmt::format("{}\tmembers\tThe entity set [TAIL], which is a set of members, {} [HEAD].\n", r.name, r.phrase);
  }
  return out;
}

kg::KnowledgeGraph fixture_graph(const FixtureSpec& spec) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < spec.groups * spec.group_size; ++i) names.push_back(fixture_entity_name(i));
  kg::GraphBuilder b;
  for_each_fixture_triple(spec, [&](std::size_t h, const std::string& r, std::size_t t) { b.add(names[h], r, names[t]); });
  return std::move(b).build();
}

qgen::TemplateSet fixture_templates() { return qgen::parse_templates(fixture_templates_tsv()); }

kg::KnowledgeGraph random_graph(Rng& rng, std::size_t max_entities, std::size_t max_relations, double density) {
  const std::size_t n = 1 + uniform_index(rng, max_entities);
  const std::size_t m = 1 + uniform_index(rng, max_relations);
  kg::GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_entity(fmt::format("e{}", i));
  bool used = false;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t t = 0; t < n; ++t) {
        if (uniform_unit(rng) < density) {
          b.add(fmt::format("e{}", h), fmt::format("r{}", r), fmt::format("e{}", t));
          used = true;
        }
      }
    }
    // Relations only exist once they carry a triple.
    if (!used) {
      b.add(fmt::format("e{}", uniform_index(rng, n)), fmt::format("r{}", r), fmt::format("e{}", uniform_index(rng, n)));
    }
    used = false;
  }
  return std::move(b).build();
}

query::GroundedQuery random_grounding(Rng& rng, const kg::KnowledgeGraph& kg, const query::QueryTypeTree& tree) {
  std::vector<RelationId> relations;
  std::vector<EntityId> anchors;
  for (std::size_t i = 0; i < query::count_kind(tree, query::NodeKind::kProjection); ++i) {
    relations.push_back(RelationId{static_cast<std::uint32_t>(uniform_index(rng, kg.relation_count()))});
  }
  for (std::size_t i = 0; i < query::count_kind(tree, query::NodeKind::kEntity); ++i) {
    anchors.push_back(EntityId{static_cast<std::uint32_t>(uniform_index(rng, kg.entity_count()))});
  }
  return query::GroundedQuery::from_bindings(tree, relations, anchors);
}

query::QueryTypeTree random_tree(Rng& rng, int budget) {
  using namespace query;
  if (budget <= 0) return project(entity());
  const auto kind = uniform_index(rng, 5);
  if (kind == 0) return entity();
  if (kind == 1) return project(random_tree(rng, budget - 1));
  // children drawn in a fixed order so the stream does not depend on the compiler
  auto left = random_tree(rng, budget - 1);
  auto right = random_tree(rng, budget - 1);
  if (kind == 2) return intersect(std::move(left), std::move(right));
  if (kind == 3) return unite(std::move(left), std::move(right));
  return intersect(negate(std::move(left)), std::move(right));
}

}  // namespace kgforge::testing
