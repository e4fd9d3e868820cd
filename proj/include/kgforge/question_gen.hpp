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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgforge/kg_store.hpp"
#include "kgforge/query_engine.hpp"

namespace kgforge::qgen {

inline constexpr std::string_view kHeadSlot = "[HEAD]";
inline constexpr std::string_view kTailSlot = "[TAIL]";

struct RelationTemplate {
  std::string relation;
  std::string tail_category;
  /// Sentence with exactly one [HEAD] and one [TAIL].
  std::string text;
};

class TemplateSet {
 public:
  /// Later rows for the same relation replace earlier ones.
  void add(RelationTemplate tmpl);
  const RelationTemplate* find(std::string_view relation) const;
  std::size_t size() const { return by_relation_.size(); }

 private:
  std::map<std::string, RelationTemplate, std::less<>> by_relation_;
};

/// Throws ValidationError unless [HEAD] and [TAIL] each occur exactly once.
void validate_template(const RelationTemplate& tmpl);

/// Rows of `relation<TAB>tail-category<TAB>template`; blank lines and lines
/// starting with '#' are skipped. Duplicate relations: last row wins, warned.
TemplateSet parse_templates(std::string_view text);
TemplateSet load_templates(const std::filesystem::path& path);

class VerbalizationError : public Error {
 public:
  using Error::Error;
};

class NotDecomposable : public Error {
 public:
  using Error::Error;
};

struct Verbalization {
  std::vector<std::string> sentences;  // the last one is the ask-sentence
  int result_index = 0;                // the vN the question asks about
  std::string text() const;            // sentences joined by '\n'
};

/// Post-order walk assigning v1, v2, ... to each p/i/u node. An intersection
/// with a negated operand emits one difference sentence.
Verbalization verbalize(const kg::KnowledgeGraph& kg, const query::GroundedQuery& grounded,
                        const TemplateSet& templates);

/// Relations used by `grounded` that have no template.
std::vector<std::string> missing_templates(const kg::KnowledgeGraph& kg,
                                           const query::GroundedQuery& grounded,
                                           const TemplateSet& templates);

/// Step-by-step rationale restating each verbalized sentence in order.
std::string structural_rationale(const Verbalization& verbalization);

/// The two operand branches of an i/u root as standalone queries.
std::pair<query::GroundedQuery, query::GroundedQuery> decompose_set_op(
    const query::GroundedQuery& grounded);

}  // namespace kgforge::qgen
