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

#include "kgforge/question_gen.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

#include "kgforge/util.hpp"

namespace kgforge::qgen {

using query::GroundedNode;
using query::NodeKind;

void TemplateSet::add(RelationTemplate tmpl) {
  std::string key = tmpl.relation;
  by_relation_.insert_or_assign(std::move(key), std::move(tmpl));
}

const RelationTemplate* TemplateSet::find(std::string_view relation) const {
  auto it = by_relation_.find(relation);
  return it == by_relation_.end() ? nullptr : &it->second;
}

namespace {

std::size_t occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void replace_once(std::string& text, std::string_view slot, std::string_view value) {
  const auto pos = text.find(slot);
  text.replace(pos, slot.size(), value);
}

}  // namespace

void validate_template(const RelationTemplate& tmpl) {
  if (tmpl.relation.empty()) throw ValidationError("template row has an empty relation name");
  for (std::string_view slot : {kHeadSlot, kTailSlot}) {
    const std::size_t n = occurrences(tmpl.text, slot);
    if (n != 1) {
      throw ValidationError("template for '" + tmpl.relation + "' must contain " +
                            std::string(slot) + " exactly once (found " + std::to_string(n) + ")");
    }
  }
}

TemplateSet parse_templates(std::string_view text) {
  TemplateSet set;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) {
      throw ParseError("template line " + std::to_string(line_no) +
                           ": expected relation<TAB>tail-category<TAB>template",
                       line_no);
    }
    RelationTemplate tmpl{std::string(trim(cols[0])), std::string(trim(cols[1])),
                          std::string(trim(cols[2]))};
    validate_template(tmpl);
    if (set.find(tmpl.relation)) {
      spdlog::warn("template line {}: duplicate relation '{}', keeping the later row", line_no,
                   tmpl.relation);
    }
    set.add(std::move(tmpl));
  }
  return set;
}

TemplateSet load_templates(const std::filesystem::path& path) {
  return parse_templates(read_file(path));
}

std::string Verbalization::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back('\n');
    out += s;
  }
  return out;
}

std::vector<std::string> missing_templates(const kg::KnowledgeGraph& kg,
                                           const query::GroundedQuery& grounded,
                                           const TemplateSet& templates) {
  std::set<std::string> missing;
  for (RelationId r : grounded.relations()) {
    const std::string& name = kg.relation(r).name;
    if (!templates.find(name)) missing.insert(name);
  }
  return {missing.begin(), missing.end()};
}

namespace {

std::string set_name(int index) { return "v" + std::to_string(index); }

class Verbalizer {
 public:
  Verbalizer(const kg::KnowledgeGraph& kg, const TemplateSet& templates)
      : kg_(kg), templates_(templates) {}

  // Returns the index of the set this node introduces.
  int visit(const GroundedNode& node) {
    switch (node.kind) {
      case NodeKind::kProjection: return projection(node);
      case NodeKind::kIntersection:
      case NodeKind::kUnion: return set_operation(node);
      case NodeKind::kEntity:
      case NodeKind::kNegation: break;
    }
    throw VerbalizationError(std::string("malformed grounding: '") + symbol(node.kind) +
                             "' cannot introduce a set here");
  }

  std::vector<std::string> take() { return std::move(sentences_); }

 private:
  int projection(const GroundedNode& node) {
    const GroundedNode& child = node.children.at(0);
    std::string head;
    if (child.kind == NodeKind::kEntity) {
      head = kg_.entity(child.anchor).name;
    } else {
      head = "in the entity set " + set_name(visit(child));
    }
    const int index = ++index_;
    const RelationTemplate* tmpl = templates_.find(kg_.relation(node.relation).name);
    if (!tmpl) throw VerbalizationError("no template for relation " + kg_.relation(node.relation).name);
    std::string sentence = tmpl->text;
    replace_once(sentence, kTailSlot, set_name(index));
    replace_once(sentence, kHeadSlot, head);
    sentences_.push_back(std::move(sentence));
    return index;
  }

  int set_operation(const GroundedNode& node) {
    const GroundedNode& left = node.children.at(0);
    const GroundedNode& right = node.children.at(1);
    const bool left_negated = left.kind == NodeKind::kNegation;
    const bool right_negated = right.kind == NodeKind::kNegation;
    if (node.kind == NodeKind::kUnion && (left_negated || right_negated)) {
      throw VerbalizationError("malformed grounding: negation under a union");
    }
    if (left_negated && right_negated) {
      throw VerbalizationError("malformed grounding: intersection of two negations");
    }
    const int first = visit(left_negated ? left.children.at(0) : left);
    const int second = visit(right_negated ? right.children.at(0) : right);
    const int index = ++index_;
    if (left_negated || right_negated) {
      const int kept = left_negated ? second : first;
      const int removed = left_negated ? first : second;
      sentences_.push_back("The entity set " + set_name(index) + " contains the entities in " +
                           set_name(kept) + " that are not in " + set_name(removed) + ".");
    } else {
      const char* op = node.kind == NodeKind::kIntersection ? "intersection" : "union";
      sentences_.push_back(std::string("The ") + op + " of sets " + set_name(first) + " and " +
                           set_name(second) + " is " + set_name(index) + ".");
    }
    return index;
  }

  const kg::KnowledgeGraph& kg_;
  const TemplateSet& templates_;
  int index_ = 0;
  std::vector<std::string> sentences_;
};

}  // namespace

Verbalization verbalize(const kg::KnowledgeGraph& kg, const query::GroundedQuery& grounded,
                        const TemplateSet& templates) {
  grounded.validate(kg);
  if (auto missing = missing_templates(kg, grounded, templates); !missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw VerbalizationError("missing relation templates: " + list);
  }
  Verbalizer v(kg, templates);
  Verbalization out;
  out.result_index = v.visit(grounded.root());
  out.sentences = v.take();
  out.sentences.push_back("Please name 10 entities from " + set_name(out.result_index) + ".");
  return out;
}

std::string structural_rationale(const Verbalization& verbalization) {
  std::string out;
  const std::size_t steps = verbalization.sentences.size() - 1;  // drop the ask
  for (std::size_t i = 0; i < steps; ++i) {
    std::string s = verbalization.sentences[i];
    if (!s.empty() && s.front() >= 'A' && s.front() <= 'Z') s.front() = static_cast<char>(s.front() - 'A' + 'a');
    const char* lead = i == 0 ? "Firstly, " : (i + 1 == steps ? "Finally, " : "Then, ");
    if (steps == 1) lead = "";
    if (!out.empty()) out.push_back('\n');
    out += lead;
    out += steps == 1 ? verbalization.sentences[i] : s;
  }
  if (!out.empty()) out.push_back('\n');
  out += "So v" + std::to_string(verbalization.result_index) + " holds the requested entities.";
  return out;
}

std::pair<query::GroundedQuery, query::GroundedQuery> decompose_set_op(
    const query::GroundedQuery& grounded) {
  const GroundedNode& root = grounded.root();
  if (root.kind != NodeKind::kIntersection && root.kind != NodeKind::kUnion) {
    throw NotDecomposable("only intersection or union roots decompose, got '" +
                          std::string(1, symbol(root.kind)) + "'");
  }
  for (const auto& child : root.children) {
    if (child.kind == NodeKind::kNegation) {
      throw NotDecomposable("intersection with a negated operand does not decompose");
    }
  }
  return {query::GroundedQuery(root.children[0]), query::GroundedQuery(root.children[1])};
}

}  // namespace kgforge::qgen
