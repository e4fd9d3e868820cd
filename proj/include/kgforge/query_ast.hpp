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
#include <string>
#include <string_view>
#include <vector>

namespace kgforge::query {

/// Node kinds of a query pattern, written p/i/u/n/e in formulas.
enum class NodeKind { kProjection, kIntersection, kUnion, kNegation, kEntity };

char symbol(NodeKind kind);
/// Number of children a node of this kind must have.
std::size_t arity(NodeKind kind);

/// A query pattern: projections over anchor leaves combined with binary
/// set operations. Formulas look like "(i,(n,(p,(e))),(p,(p,(e))))".
struct QueryTypeTree {
  NodeKind kind = NodeKind::kEntity;
  std::vector<QueryTypeTree> children;

  friend bool operator==(const QueryTypeTree&, const QueryTypeTree&) = default;
};

QueryTypeTree entity();
QueryTypeTree project(QueryTypeTree child);
QueryTypeTree negate(QueryTypeTree child);
QueryTypeTree intersect(QueryTypeTree left, QueryTypeTree right);
QueryTypeTree unite(QueryTypeTree left, QueryTypeTree right);

/// Strict parser. Whitespace anywhere is ignored; anything else that is not
/// part of a well-formed formula raises ParseError with the character offset.
QueryTypeTree parse_formula(std::string_view text);
std::string serialize(const QueryTypeTree& tree);

/// Maximum number of p nodes on any root-to-leaf path.
int reasoning_depth(const QueryTypeTree& tree);
/// Number of distinct operator kinds (p, i, u, n) in the tree.
int operation_variety(const QueryTypeTree& tree);

enum class Family { kProjection, kIntersection, kUnion, kNegation };

/// Family of the final operation. An intersection whose direct child is a
/// negation counts as Negation. Throws ValidationError for e or n roots.
Family pattern_family(const QueryTypeTree& tree);

std::string_view family_name(Family family);        // "Projection"
std::string_view family_short_name(Family family);  // "Pro."
Family parse_family(std::string_view text);

std::size_t count_kind(const QueryTypeTree& tree, NodeKind kind);
std::size_t node_count(const QueryTypeTree& tree);
bool contains_negation(const QueryTypeTree& tree);

struct PatternCatalogEntry {
  std::string formula;
  QueryTypeTree tree;
  Family family = Family::kProjection;
  int depth = 0;
  int variety = 0;
};

/// Catalog text: one formula per line, optionally `formula|family|depth|variety`.
/// Declared values are cross-checked against the computed ones.
std::vector<PatternCatalogEntry> parse_catalog(std::string_view text);
std::vector<PatternCatalogEntry> load_catalog(const std::filesystem::path& path);

/// The built-in 26-pattern catalog.
const std::vector<PatternCatalogEntry>& default_catalog();
std::string_view default_catalog_text();

/// Index of `formula` (canonical form) in `catalog`, or -1.
int find_pattern(const std::vector<PatternCatalogEntry>& catalog, std::string_view formula);

}  // namespace kgforge::query
