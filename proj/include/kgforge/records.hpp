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

// JSON-lines artifacts passed between pipeline stages. Every file starts
// with a header record naming its schema; readers reject other schemas.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "kgforge/common.hpp"
#include "kgforge/kg_store.hpp"
#include "kgforge/query_ast.hpp"
#include "kgforge/query_engine.hpp"
#include "kgforge/query_sampler.hpp"

namespace kgforge::records {

inline constexpr std::string_view kQueriesSchema = "kgforge/queries/v1";
inline constexpr std::string_view kQuestionsSchema = "kgforge/questions/v1";
inline constexpr std::string_view kEvalsSchema = "kgforge/evals/v1";

struct Header {
  std::string schema;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> inputs;  // path -> sha256
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

nlohmann::ordered_json header_to_json(const Header& h);
/// Throws SchemaError unless `j` is a header for `expected_schema`.
Header header_from_json(const nlohmann::json& j, std::string_view expected_schema);

struct QueryRecord {
  std::string id;
  std::string formula;
  std::vector<std::string> relations;  // pre-order, one per p node
  std::vector<std::string> anchors;    // pre-order, one per e leaf
  std::vector<std::string> gold;       // sorted by entity id
  std::string seed_vertex;
  std::string family;
  int depth = 0;
  int variety = 0;
};

struct QuestionRecord {
  QueryRecord query;
  std::string text;
  int result_index = 0;
  std::string role = "main";  // "main" or "sub"
  std::optional<std::string> parent;
};

struct MatchRecord {
  std::string answer;
  double score = 0.0;
  std::optional<std::string> gold;
};

struct EvalRecord {
  std::string question_id;
  std::string formula;
  std::string family;
  int depth = 0;
  int variety = 0;
  std::string role = "main";
  std::optional<std::string> parent;
  std::size_t gold_size = 0;
  std::string mode;
  std::size_t shots = 0;
  std::string strategy;
  std::vector<std::string> demo_ids;
  std::string system_prompt;
  std::string user_prompt;
  std::string raw;
  std::optional<std::string> error_kind;
  std::optional<std::string> error_message;
  int attempts = 0;
  std::vector<std::string> extracted;
  std::vector<MatchRecord> matches;
  std::size_t matched = 0;
  double precision = 0.0;
  double threshold = 0.0;
};

template <typename Record>
struct Artifact {
  Header header;
  std::vector<Record> records;
};

/// Maps a sampled query to names. `ordinal` counts within its pattern.
QueryRecord make_query_record(const kg::KnowledgeGraph& kg, const sampler::SampledQuery& sampled,
                              const query::PatternCatalogEntry& entry, std::size_t ordinal);

/// Resolves names back to ids. Throws ValidationError on unknown names.
query::GroundedQuery bind(const kg::KnowledgeGraph& kg, const QueryRecord& record);

nlohmann::ordered_json to_json(const QueryRecord& r);
nlohmann::ordered_json to_json(const QuestionRecord& r);
nlohmann::ordered_json to_json(const EvalRecord& r);
QueryRecord query_from_json(const nlohmann::json& j);
QuestionRecord question_from_json(const nlohmann::json& j);
EvalRecord eval_from_json(const nlohmann::json& j);

std::string render_jsonl(const Header& header, const std::vector<nlohmann::ordered_json>& lines);

Artifact<QueryRecord> read_queries(const std::filesystem::path& path);
Artifact<QuestionRecord> read_questions(const std::filesystem::path& path);
/// Tolerates a truncated final line (an interrupted run) by dropping it.
Artifact<EvalRecord> read_evals(const std::filesystem::path& path);

void write_queries(const std::filesystem::path& path, const Header& header, const std::vector<QueryRecord>& rs);
void write_questions(const std::filesystem::path& path, const Header& header,
                     const std::vector<QuestionRecord>& rs);
void write_evals(const std::filesystem::path& path, const Header& header, const std::vector<EvalRecord>& rs);

}  // namespace kgforge::records
