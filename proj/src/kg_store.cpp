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

#include "kgforge/kg_store.hpp"

#include <algorithm>
#include <unordered_set>

#include "kgforge/util.hpp"

namespace kgforge::kg {

std::string canonical_name(std::string_view name) { return ascii_lower(trim(name)); }

const Entity& KnowledgeGraph::entity(EntityId id) const {
  check(id);
  return entities_[index_of(id)];
}

const Relation& KnowledgeGraph::relation(RelationId id) const {
  check(id);
  return relations_[index_of(id)];
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  auto it = entity_by_name_.find(std::string(name));
  if (it == entity_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  auto it = relation_by_name_.find(std::string(name));
  if (it == relation_by_name_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::check(EntityId id) const {
  if (index_of(id) >= entities_.size()) {
    throw ContractViolation("entity id " + std::to_string(index_of(id)) + " out of range");
  }
}

void KnowledgeGraph::check(RelationId id) const {
  if (index_of(id) >= relations_.size()) {
    throw ContractViolation("relation id " + std::to_string(index_of(id)) + " out of range");
  }
}

std::span<const Edge> KnowledgeGraph::slice(const std::vector<std::size_t>& offsets,
                                            const std::vector<Edge>& edges,
                                            EntityId id) const {
  check(id);
  const std::size_t i = index_of(id);
  return std::span<const Edge>(edges).subspan(offsets[i], offsets[i + 1] - offsets[i]);
}

std::span<const Edge> KnowledgeGraph::in_edges(EntityId entity) const {
  return slice(in_offsets_, in_edges_, entity);
}

std::span<const Edge> KnowledgeGraph::out_edges(EntityId entity) const {
  return slice(out_offsets_, out_edges_, entity);
}

std::vector<EntityId> KnowledgeGraph::neighbors(EntityId entity, RelationId relation,
                                                Direction direction) const {
  check(relation);
  auto edges = direction == Direction::kForward ? out_edges(entity) : in_edges(entity);
  auto lo = std::lower_bound(edges.begin(), edges.end(), Edge{relation, EntityId{0}});
  std::vector<EntityId> out;
  for (auto it = lo; it != edges.end() && it->relation == relation; ++it) {
    out.push_back(it->other);
  }
  return out;
}

bool KnowledgeGraph::has_triple(EntityId head, RelationId relation, EntityId tail) const {
  auto edges = out_edges(head);
  return std::binary_search(edges.begin(), edges.end(), Edge{relation, tail});
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.entities = entities_.size();
  s.relations = relations_.size();
  s.triples = triples_.size();
  s.per_relation.resize(relations_.size());
  std::vector<std::unordered_map<std::uint32_t, std::size_t>> out_degree(relations_.size());
  std::vector<std::unordered_set<std::uint32_t>> tails(relations_.size());
  for (const Triple& t : triples_) {
    const auto r = index_of(t.relation);
    ++s.per_relation[r].triples;
    ++out_degree[r][index_of(t.head)];
    tails[r].insert(index_of(t.tail));
  }
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    RelationStats& rs = s.per_relation[r];
    rs.name = relations_[r].name;
    rs.distinct_heads = out_degree[r].size();
    rs.distinct_tails = tails[r].size();
    for (const auto& [head, degree] : out_degree[r]) ++rs.out_degree_histogram[degree];
  }
  return s;
}

EntityId GraphBuilder::intern_entity(std::string_view name) {
  if (trim(name).empty()) throw ValidationError("empty entity name");
  auto exact = graph_.entity_by_name_.find(std::string(name));
  if (exact != graph_.entity_by_name_.end()) return exact->second;
  std::string key = canonical_name(name);
  if (auto it = canonical_entities_.find(key); it != canonical_entities_.end()) {
    throw ValidationError("entity name collision after canonicalization: '" +
                          std::string(name) + "' vs '" +
                          graph_.entities_[index_of(it->second)].name + "'");
  }
  const EntityId id{static_cast<std::uint32_t>(graph_.entities_.size())};
  graph_.entities_.push_back(Entity{id, std::string(name), std::nullopt});
  graph_.entity_by_name_.emplace(std::string(name), id);
  canonical_entities_.emplace(std::move(key), id);
  return id;
}

RelationId GraphBuilder::intern_relation(std::string_view name) {
  if (trim(name).empty()) throw ValidationError("empty relation name");
  auto it = graph_.relation_by_name_.find(std::string(name));
  if (it != graph_.relation_by_name_.end()) return it->second;
  const RelationId id{static_cast<std::uint32_t>(graph_.relations_.size())};
  graph_.relations_.push_back(Relation{id, std::string(name)});
  graph_.relation_by_name_.emplace(std::string(name), id);
  return id;
}

bool GraphBuilder::add(std::string_view head, std::string_view relation,
                       std::string_view tail) {
  Triple t{intern_entity(head), intern_relation(relation), intern_entity(tail)};
  if (!seen_.insert(t).second) return false;
  graph_.triples_.push_back(t);
  return true;
}

EntityId GraphBuilder::add_entity(std::string_view name) { return intern_entity(name); }

void GraphBuilder::set_category(std::string_view entity, std::string_view category) {
  EntityId id = intern_entity(entity);
  graph_.entities_[index_of(id)].category = std::string(category);
}

namespace {

void build_csr(std::size_t entity_count, const std::vector<Triple>& triples, bool forward,
               std::vector<std::size_t>& offsets, std::vector<Edge>& edges) {
  offsets.assign(entity_count + 1, 0);
  for (const Triple& t : triples) ++offsets[index_of(forward ? t.head : t.tail) + 1];
  for (std::size_t i = 0; i < entity_count; ++i) offsets[i + 1] += offsets[i];
  edges.resize(triples.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Triple& t : triples) {
    const EntityId from = forward ? t.head : t.tail;
    const EntityId to = forward ? t.tail : t.head;
    edges[cursor[index_of(from)]++] = Edge{t.relation, to};
  }
  for (std::size_t i = 0; i < entity_count; ++i) {
    std::sort(edges.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
              edges.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
  }
}

}  // namespace

KnowledgeGraph GraphBuilder::build() && {
  KnowledgeGraph g = std::move(graph_);
  build_csr(g.entities_.size(), g.triples_, true, g.out_offsets_, g.out_edges_);
  build_csr(g.entities_.size(), g.triples_, false, g.in_offsets_, g.in_edges_);
  return g;
}

Format parse_format(std::string_view text) {
  if (text == "tsv-hrt" || text == "tsv") return Format::kTsvHrt;
  if (text == "csv-with-header" || text == "csv") return Format::kCsvWithHeader;
  throw ConfigError("unknown KG format '" + std::string(text) +
                    "' (expected tsv-hrt or csv-with-header)");
}

namespace {

// Minimal RFC 4180 field splitter for a single physical line.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote", line_no);
  fields.push_back(std::move(field));
  return fields;
}

std::unordered_map<std::string, std::string> load_id_map(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> map;
  const std::string text = read_file(path);
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                           ": expected 2 tab-separated columns, got " +
                           std::to_string(cols.size()),
                       line_no);
    }
    map[std::string(cols[0])] = std::string(cols[1]);
  }
  return map;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV header has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

KnowledgeGraph parse_triples(std::string_view text, const LoadOptions& options) {
  std::unordered_map<std::string, std::string> id_map;
  if (options.id_map) id_map = load_id_map(*options.id_map);
  auto surface = [&](std::string_view raw) -> std::string_view {
    if (id_map.empty()) return raw;
    auto it = id_map.find(std::string(raw));
    return it == id_map.end() ? raw : std::string_view(it->second);
  };

  GraphBuilder builder;
  const auto lines = split_lines(text);
  if (options.format == Format::kTsvHrt) {
    std::size_t line_no = 0;
    for (std::string_view line : lines) {
      ++line_no;
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 3) {
        throw ParseError("line " + std::to_string(line_no) + ": expected 3 tab-separated columns, got " +
                             std::to_string(cols.size()),
                         line_no);
      }
      builder.add(surface(cols[0]), cols[1], surface(cols[2]));
    }
    return std::move(builder).build();
  }

  if (options.head_column.empty() || options.relation_column.empty() ||
      options.tail_column.empty()) {
    throw ConfigError("csv-with-header requires head, relation and tail column names");
  }
  if (lines.empty()) throw ParseError("line 1: missing CSV header", 1);
  const auto header = split_csv_line(lines[0], 1);
  const std::size_t h = column_index(header, options.head_column);
  const std::size_t r = column_index(header, options.relation_column);
  const std::size_t t = column_index(header, options.tail_column);
  std::optional<std::size_t> hc, tc;
  if (!options.head_category_column.empty()) hc = column_index(header, options.head_category_column);
  if (!options.tail_category_column.empty()) tc = column_index(header, options.tail_category_column);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    auto cols = split_csv_line(lines[i], line_no);
    if (cols.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " columns, got " +
                           std::to_string(cols.size()),
                       line_no);
    }
    const std::string head(surface(cols[h]));
    const std::string tail(surface(cols[t]));
    builder.add(head, cols[r], tail);
    if (hc && !cols[*hc].empty()) builder.set_category(head, cols[*hc]);
    if (tc && !cols[*tc].empty()) builder.set_category(tail, cols[*tc]);
  }
  return std::move(builder).build();
}

KnowledgeGraph load_triples(const std::filesystem::path& path, const LoadOptions& options) {
  if (!std::filesystem::exists(path)) throw Error("no such file: " + path.string());
  return parse_triples(read_file(path), options);
}

}  // namespace kgforge::kg
