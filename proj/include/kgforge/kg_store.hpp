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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgforge/common.hpp"

namespace kgforge::kg {

struct Entity {
  EntityId id{};
  std::string name;
  std::optional<std::string> category;
};

struct Relation {
  RelationId id{};
  std::string name;
};

struct Triple {
  EntityId head{};
  RelationId relation{};
  EntityId tail{};
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// One adjacency entry: the relation and the entity at the other end.
struct Edge {
  RelationId relation{};
  EntityId other{};
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t key = (static_cast<std::uint64_t>(index_of(t.head)) << 32) ^
                        (static_cast<std::uint64_t>(index_of(t.relation)) << 20) ^
                        index_of(t.tail);
    return std::hash<std::uint64_t>{}(key * 0x9e3779b97f4a7c15ULL);
  }
};

enum class Direction { kForward, kReverse };

struct RelationStats {
  std::string name;
  std::size_t triples = 0;
  std::size_t distinct_heads = 0;
  std::size_t distinct_tails = 0;
  /// out-degree -> number of heads with that out-degree
  std::map<std::size_t, std::size_t> out_degree_histogram;
};

struct GraphStats {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t triples = 0;
  std::vector<RelationStats> per_relation;
};

/// Immutable triple store. Each entity owns a slice of a CSR edge array for
/// both directions, sorted by (relation, other), so per-relation neighbor
/// lookups are a binary search inside the slice.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::span<const Entity> entities() const { return entities_; }
  std::span<const Relation> relations() const { return relations_; }
  /// Distinct triples in first-seen order.
  std::span<const Triple> triples() const { return triples_; }

  std::size_t entity_count() const { return entities_.size(); }
  std::size_t relation_count() const { return relations_.size(); }

  const Entity& entity(EntityId id) const;
  const Relation& relation(RelationId id) const;

  /// Exact surface-name lookup.
  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

  /// Sorted, duplicate-free neighbor ids. Throws ContractViolation on bad ids.
  std::vector<EntityId> neighbors(EntityId entity, RelationId relation,
                                  Direction direction) const;

  /// All (relation, head) pairs with an edge into `entity`.
  std::span<const Edge> in_edges(EntityId entity) const;
  /// All (relation, tail) pairs with an edge out of `entity`.
  std::span<const Edge> out_edges(EntityId entity) const;

  bool has_triple(EntityId head, RelationId relation, EntityId tail) const;

  GraphStats stats() const;

 private:
  friend class GraphBuilder;

  void check(EntityId id) const;
  void check(RelationId id) const;
  std::span<const Edge> slice(const std::vector<std::size_t>& offsets,
                              const std::vector<Edge>& edges, EntityId id) const;

  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  std::vector<Triple> triples_;
  std::unordered_map<std::string, EntityId> entity_by_name_;
  std::unordered_map<std::string, RelationId> relation_by_name_;
  std::vector<std::size_t> out_offsets_;
  std::vector<Edge> out_edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<Edge> in_edges_;
};

/// Accumulates named triples and freezes them into a KnowledgeGraph.
class GraphBuilder {
 public:
  /// Returns false when the triple was already present.
  bool add(std::string_view head, std::string_view relation, std::string_view tail);
  /// Registers an entity that may have no triples.
  EntityId add_entity(std::string_view name);
  void set_category(std::string_view entity, std::string_view category);
  KnowledgeGraph build() &&;

 private:
  EntityId intern_entity(std::string_view name);
  RelationId intern_relation(std::string_view name);

  KnowledgeGraph graph_;
  std::unordered_map<std::string, EntityId> canonical_entities_;
  std::unordered_set<Triple, TripleHash> seen_;
};

/// Trim + ASCII case fold: the uniqueness key for entity names.
std::string canonical_name(std::string_view name);

enum class Format { kTsvHrt, kCsvWithHeader };

Format parse_format(std::string_view text);

struct LoadOptions {
  Format format = Format::kTsvHrt;
  // CSV column names; required for kCsvWithHeader.
  std::string head_column;
  std::string relation_column;
  std::string tail_column;
  std::string head_category_column;
  std::string tail_category_column;
  /// Optional `id<TAB>name` file mapping raw identifiers to surface names.
  std::optional<std::filesystem::path> id_map;
};

KnowledgeGraph load_triples(const std::filesystem::path& path, const LoadOptions& options);
KnowledgeGraph parse_triples(std::string_view text, const LoadOptions& options);

}  // namespace kgforge::kg
