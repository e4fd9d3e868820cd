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

#include "kgforge/query_ast.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>

#include "kgforge/common.hpp"
#include "kgforge/util.hpp"

namespace kgforge::query {

char symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::kProjection: return 'p';
    case NodeKind::kIntersection: return 'i';
    case NodeKind::kUnion: return 'u';
    case NodeKind::kNegation: return 'n';
    case NodeKind::kEntity: return 'e';
  }
  return '?';
}

std::size_t arity(NodeKind kind) {
  switch (kind) {
    case NodeKind::kEntity: return 0;
    case NodeKind::kProjection:
    case NodeKind::kNegation: return 1;
    case NodeKind::kIntersection:
    case NodeKind::kUnion: return 2;
  }
  return 0;
}

QueryTypeTree entity() { return QueryTypeTree{NodeKind::kEntity, {}}; }
QueryTypeTree project(QueryTypeTree child) {
  return QueryTypeTree{NodeKind::kProjection, {std::move(child)}};
}
QueryTypeTree negate(QueryTypeTree child) {
  return QueryTypeTree{NodeKind::kNegation, {std::move(child)}};
}
QueryTypeTree intersect(QueryTypeTree left, QueryTypeTree right) {
  return QueryTypeTree{NodeKind::kIntersection, {std::move(left), std::move(right)}};
}
QueryTypeTree unite(QueryTypeTree left, QueryTypeTree right) {
  return QueryTypeTree{NodeKind::kUnion, {std::move(left), std::move(right)}};
}

namespace {

constexpr int kMaxNesting = 256;

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  QueryTypeTree parse() {
    QueryTypeTree root = node(0);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("formula offset " + std::to_string(pos_) + ": " + what, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) {
      if (pos_ >= text_.size()) fail(std::string("unbalanced: expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "', found '" + text_[pos_] + "'");
    }
    ++pos_;
  }

  QueryTypeTree node(int nesting) {
    if (nesting > kMaxNesting) fail("nesting too deep");
    expect('(');
    const char op = peek();
    QueryTypeTree tree;
    switch (op) {
      case 'p': tree.kind = NodeKind::kProjection; break;
      case 'i': tree.kind = NodeKind::kIntersection; break;
      case 'u': tree.kind = NodeKind::kUnion; break;
      case 'n': tree.kind = NodeKind::kNegation; break;
      case 'e': tree.kind = NodeKind::kEntity; break;
      case '\0': fail("unbalanced: operator expected before end of input");
      default: fail(std::string("unknown operator '") + op + "'");
    }
    ++pos_;
    const std::size_t want = arity(tree.kind);
    for (;;) {
      const char c = peek();
      if (c == ',') {
        if (tree.children.size() == want) {
          fail(std::string("too many operands for '") + symbol(tree.kind) + "'");
        }
        ++pos_;
        tree.children.push_back(node(nesting + 1));
      } else if (c == ')') {
        if (tree.children.size() != want) {
          fail(std::string("'") + symbol(tree.kind) + "' takes " + std::to_string(want) +
               " operand(s), got " + std::to_string(tree.children.size()));
        }
        ++pos_;
        return tree;
      } else if (c == '\0') {
        fail("unbalanced: missing ')'");
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void serialize_into(const QueryTypeTree& tree, std::string& out) {
  out.push_back('(');
  out.push_back(symbol(tree.kind));
  for (const auto& child : tree.children) {
    out.push_back(',');
    serialize_into(child, out);
  }
  out.push_back(')');
}

void collect_kinds(const QueryTypeTree& tree, unsigned& mask) {
  if (tree.kind != NodeKind::kEntity) mask |= 1u << static_cast<unsigned>(tree.kind);
  for (const auto& child : tree.children) collect_kinds(child, mask);
}

}  // namespace

QueryTypeTree parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::string serialize(const QueryTypeTree& tree) {
  std::string out;
  serialize_into(tree, out);
  return out;
}

int reasoning_depth(const QueryTypeTree& tree) {
  int deepest = 0;
  for (const auto& child : tree.children) deepest = std::max(deepest, reasoning_depth(child));
  return deepest + (tree.kind == NodeKind::kProjection ? 1 : 0);
}

int operation_variety(const QueryTypeTree& tree) {
  unsigned mask = 0;
  collect_kinds(tree, mask);
  return std::popcount(mask);
}

Family pattern_family(const QueryTypeTree& tree) {
  switch (tree.kind) {
    case NodeKind::kProjection: return Family::kProjection;
    case NodeKind::kUnion: return Family::kUnion;
    case NodeKind::kIntersection:
      for (const auto& child : tree.children) {
        if (child.kind == NodeKind::kNegation) return Family::kNegation;
      }
      return Family::kIntersection;
    case NodeKind::kNegation:
    case NodeKind::kEntity: break;
  }
  throw ValidationError(std::string("cannot classify a pattern rooted at '") + symbol(tree.kind) +
                        "'");
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kProjection: return "Projection";
    case Family::kIntersection: return "Intersection";
    case Family::kUnion: return "Union";
    case Family::kNegation: return "Negation";
  }
  return "?";
}

std::string_view family_short_name(Family family) {
  switch (family) {
    case Family::kProjection: return "Pro.";
    case Family::kIntersection: return "Int.";
    case Family::kUnion: return "Uni.";
    case Family::kNegation: return "Neg.";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  const std::string lower = ascii_lower(trim(text));
  for (Family f : {Family::kProjection, Family::kIntersection, Family::kUnion, Family::kNegation}) {
    if (lower == ascii_lower(family_name(f)) || lower == ascii_lower(family_short_name(f))) return f;
  }
  throw ValidationError("unknown pattern family '" + std::string(text) + "'");
}

std::size_t count_kind(const QueryTypeTree& tree, NodeKind kind) {
  std::size_t n = tree.kind == kind ? 1 : 0;
  for (const auto& child : tree.children) n += count_kind(child, kind);
  return n;
}

std::size_t node_count(const QueryTypeTree& tree) {
  std::size_t n = 1;
  for (const auto& child : tree.children) n += node_count(child);
  return n;
}

bool contains_negation(const QueryTypeTree& tree) {
  return count_kind(tree, NodeKind::kNegation) > 0;
}

namespace {

int parse_int_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("catalog line " + std::to_string(line_no) + ": not an integer: '" +
                         std::string(field) + "'",
                     line_no);
  }
  return value;
}

}  // namespace

std::vector<PatternCatalogEntry> parse_catalog(std::string_view text) {
  std::vector<PatternCatalogEntry> catalog;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '|');
    PatternCatalogEntry entry;
    try {
      entry.tree = parse_formula(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError("catalog line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    entry.formula = serialize(entry.tree);
    entry.family = pattern_family(entry.tree);
    entry.depth = reasoning_depth(entry.tree);
    entry.variety = operation_variety(entry.tree);
    if (fields.size() != 1 && fields.size() != 4) {
      throw ParseError("catalog line " + std::to_string(line_no) +
                           ": expected formula or formula|family|depth|variety",
                       line_no);
    }
    if (fields.size() == 4) {
      const Family declared_family = parse_family(fields[1]);
      const int declared_depth = parse_int_field(fields[2], line_no);
      const int declared_variety = parse_int_field(fields[3], line_no);
      auto mismatch = [&](const std::string& what, const std::string& declared,
                          const std::string& computed) {
        throw ValidationError("catalog line " + std::to_string(line_no) + " " + entry.formula +
                              ": declared " + what + " " + declared + " but computed " + computed);
      };
      if (declared_family != entry.family) {
        mismatch("family", std::string(family_name(declared_family)),
                 std::string(family_name(entry.family)));
      }
      if (declared_depth != entry.depth) {
        mismatch("depth", std::to_string(declared_depth), std::to_string(entry.depth));
      }
      if (declared_variety != entry.variety) {
        mismatch("variety", std::to_string(declared_variety), std::to_string(entry.variety));
      }
    }
    if (find_pattern(catalog, entry.formula) >= 0) {
      throw ValidationError("catalog line " + std::to_string(line_no) + ": duplicate pattern " +
                            entry.formula);
    }
    catalog.push_back(std::move(entry));
  }
  if (catalog.empty()) spdlog::warn("pattern catalog is empty");
  return catalog;
}

std::vector<PatternCatalogEntry> load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_file(path));
}

std::string_view default_catalog_text() {
  return R"(# formula|family|reasoning depth|operation variety
(p,(e))|Projection|1|1
(p,(p,(e)))|Projection|2|1
(p,(p,(p,(e))))|Projection|3|1
(p,(i,(p,(e)),(p,(e))))|Projection|2|2
(p,(i,(n,(p,(e))),(p,(e))))|Projection|2|3
(p,(u,(p,(e)),(p,(e))))|Projection|2|2
(i,(p,(e)),(p,(e)))|Intersection|1|2
(i,(p,(e)),(p,(p,(e))))|Intersection|2|2
(i,(p,(p,(e))),(p,(p,(e))))|Intersection|2|2
(i,(p,(p,(p,(e)))),(p,(p,(p,(e)))))|Intersection|3|2
(i,(i,(p,(e)),(p,(e))),(p,(e)))|Intersection|1|2
(i,(u,(p,(e)),(p,(e))),(p,(e)))|Intersection|1|3
(u,(p,(e)),(p,(e)))|Union|1|2
(u,(p,(e)),(p,(p,(e))))|Union|2|2
(u,(p,(p,(e))),(p,(p,(e))))|Union|2|2
(u,(p,(p,(p,(e)))),(p,(p,(p,(e)))))|Union|3|2
(u,(i,(p,(e)),(p,(e))),(p,(e)))|Union|1|3
(u,(u,(p,(e)),(p,(e))),(p,(e)))|Union|1|2
(i,(n,(p,(e))),(p,(e)))|Negation|1|3
(i,(n,(p,(e))),(p,(p,(e))))|Negation|2|3
(i,(n,(p,(p,(e)))),(p,(e)))|Negation|2|3
(i,(n,(p,(p,(e)))),(p,(p,(e))))|Negation|2|3
(i,(n,(p,(p,(e)))),(p,(p,(p,(e)))))|Negation|3|3
(i,(n,(p,(p,(p,(e))))),(p,(p,(p,(e)))))|Negation|3|3
(i,(n,(i,(p,(e)),(p,(e)))),(p,(e)))|Negation|1|3
(i,(n,(u,(p,(e)),(p,(e)))),(p,(e)))|Negation|1|4
)";
}

const std::vector<PatternCatalogEntry>& default_catalog() {
  static const std::vector<PatternCatalogEntry> catalog = parse_catalog(default_catalog_text());
  return catalog;
}

int find_pattern(const std::vector<PatternCatalogEntry>& catalog, std::string_view formula) {
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].formula == formula) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace kgforge::query
