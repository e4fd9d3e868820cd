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

#include "kgforge/records.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kgforge/util.hpp"

namespace kgforge::records {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json header_to_json(const Header& h) {
  ordered_json j;
  j["record"] = "header";
  j["schema"] = h.schema;
  j["tool_version"] = h.tool_version;
  j["seed"] = h.seed;
  j["config_hash"] = h.config_hash;
  j["inputs"] = ordered_json::object();
  for (const auto& [path, hash] : h.inputs) j["inputs"][path] = hash;
  j["metadata"] = h.metadata;
  return j;
}

Header header_from_json(const json& j, std::string_view expected_schema) {
  if (!j.is_object() || j.value("record", "") != "header") {
    throw SchemaError("artifact does not start with a header record");
  }
  Header h;
  h.schema = j.value("schema", "");
  if (h.schema != expected_schema) {
    throw SchemaError(fmt::format("expected schema {}, found '{}'", expected_schema, h.schema));
  }
  try {
    h.tool_version = j.at("tool_version").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [path, hash] : j.at("inputs").items()) h.inputs[path] = hash.get<std::string>();
    if (j.contains("metadata")) h.metadata = ordered_json::parse(j["metadata"].dump());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed header: ") + e.what());
  }
  return h;
}

QueryRecord make_query_record(const kg::KnowledgeGraph& kg, const sampler::SampledQuery& sampled,
                              const query::PatternCatalogEntry& entry, std::size_t ordinal) {
  QueryRecord r;
  r.id = fmt::format("q{:02}-{:03}", sampled.pattern_index, ordinal);
  r.formula = entry.formula;
  for (RelationId rel : sampled.query.relations()) r.relations.push_back(kg.relation(rel).name);
  for (EntityId e : sampled.query.anchors()) r.anchors.push_back(kg.entity(e).name);
  for (EntityId e : sampled.gold) r.gold.push_back(kg.entity(e).name);
  r.seed_vertex = kg.entity(sampled.seed_vertex).name;
  r.family = std::string(query::family_name(entry.family));
  r.depth = entry.depth;
  r.variety = entry.variety;
  return r;
}

query::GroundedQuery bind(const kg::KnowledgeGraph& kg, const QueryRecord& record) {
  const auto tree = query::parse_formula(record.formula);
  std::vector<RelationId> rels;
  for (const auto& name : record.relations) {
    auto id = kg.find_relation(name);
    if (!id) throw ValidationError(fmt::format("{}: unknown relation '{}'", record.id, name));
    rels.push_back(*id);
  }
  std::vector<EntityId> anchors;
  for (const auto& name : record.anchors) {
    auto id = kg.find_entity(name);
    if (!id) throw ValidationError(fmt::format("{}: unknown entity '{}'", record.id, name));
    anchors.push_back(*id);
  }
  try {
    return query::GroundedQuery::from_bindings(tree, rels, anchors);
  } catch (const ContractViolation& e) {
    throw ValidationError(fmt::format("{}: {}", record.id, e.what()));
  }
}

namespace {

template <typename J>
void put_query_fields(J& j, const QueryRecord& r) {
  j["id"] = r.id;
  j["formula"] = r.formula;
  j["family"] = r.family;
  j["depth"] = r.depth;
  j["variety"] = r.variety;
  j["relations"] = r.relations;
  j["anchors"] = r.anchors;
  j["seed_vertex"] = r.seed_vertex;
  j["gold"] = r.gold;
}

template <typename T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(fmt::format("record field '{}': {}", name, e.what()));
  }
}

std::optional<std::string> optional_string(const json& j, const char* name) {
  if (!j.contains(name) || j[name].is_null()) return std::nullopt;
  return field<std::string>(j, name);
}

}  // namespace

ordered_json to_json(const QueryRecord& r) {
  ordered_json j;
  put_query_fields(j, r);
  return j;
}

ordered_json to_json(const QuestionRecord& r) {
  ordered_json j;
  put_query_fields(j, r.query);
  j["role"] = r.role;
  j["parent"] = r.parent ? ordered_json(*r.parent) : ordered_json(nullptr);
  j["result_index"] = r.result_index;
  j["text"] = r.text;
  return j;
}

ordered_json to_json(const EvalRecord& r) {
  ordered_json j;
  j["question_id"] = r.question_id;
  j["formula"] = r.formula;
  j["family"] = r.family;
  j["depth"] = r.depth;
  j["variety"] = r.variety;
  j["role"] = r.role;
  j["parent"] = r.parent ? ordered_json(*r.parent) : ordered_json(nullptr);
  j["gold_size"] = r.gold_size;
  j["mode"] = r.mode;
  j["shots"] = r.shots;
  j["strategy"] = r.strategy;
  j["demo_ids"] = r.demo_ids;
  j["prompt"] = {{"system", r.system_prompt}, {"user", r.user_prompt}};
  j["raw"] = r.raw;
  if (r.error_kind) {
    j["error"] = {{"kind", *r.error_kind}, {"message", r.error_message.value_or("")}};
  } else {
    j["error"] = nullptr;
  }
  j["attempts"] = r.attempts;
  j["extracted"] = r.extracted;
  ordered_json matches = ordered_json::array();
  for (const auto& m : r.matches) {
    matches.push_back({{"answer", m.answer}, {"score", m.score}, {"gold", m.gold ? ordered_json(*m.gold) : ordered_json(nullptr)}});
  }
  j["matches"] = matches;
  j["matched"] = r.matched;
  j["precision"] = r.precision;
  j["threshold"] = r.threshold;
  return j;
}

QueryRecord query_from_json(const json& j) {
  QueryRecord r;
  r.id = field<std::string>(j, "id");
  r.formula = field<std::string>(j, "formula");
  r.family = field<std::string>(j, "family");
  r.depth = field<int>(j, "depth");
  r.variety = field<int>(j, "variety");
  r.relations = field<std::vector<std::string>>(j, "relations");
  r.anchors = field<std::vector<std::string>>(j, "anchors");
  r.seed_vertex = field<std::string>(j, "seed_vertex");
  r.gold = field<std::vector<std::string>>(j, "gold");
  return r;
}

QuestionRecord question_from_json(const json& j) {
  QuestionRecord r;
  r.query = query_from_json(j);
  r.role = field<std::string>(j, "role");
  r.parent = optional_string(j, "parent");
  r.result_index = field<int>(j, "result_index");
  r.text = field<std::string>(j, "text");
  return r;
}

EvalRecord eval_from_json(const json& j) {
  EvalRecord r;
  r.question_id = field<std::string>(j, "question_id");
  r.formula = field<std::string>(j, "formula");
  r.family = field<std::string>(j, "family");
  r.depth = field<int>(j, "depth");
  r.variety = field<int>(j, "variety");
  r.role = field<std::string>(j, "role");
  r.parent = optional_string(j, "parent");
  r.gold_size = field<std::size_t>(j, "gold_size");
  r.mode = field<std::string>(j, "mode");
  r.shots = field<std::size_t>(j, "shots");
  r.strategy = field<std::string>(j, "strategy");
  r.demo_ids = field<std::vector<std::string>>(j, "demo_ids");
  const json prompt = field<json>(j, "prompt");
  r.system_prompt = field<std::string>(prompt, "system");
  r.user_prompt = field<std::string>(prompt, "user");
  r.raw = field<std::string>(j, "raw");
  if (j.contains("error") && !j["error"].is_null()) {
    r.error_kind = field<std::string>(j["error"], "kind");
    r.error_message = field<std::string>(j["error"], "message");
  }
  r.attempts = field<int>(j, "attempts");
  r.extracted = field<std::vector<std::string>>(j, "extracted");
  for (const auto& m : field<json>(j, "matches")) {
    r.matches.push_back(MatchRecord{field<std::string>(m, "answer"), field<double>(m, "score"), optional_string(m, "gold")});
  }
  r.matched = field<std::size_t>(j, "matched");
  r.precision = field<double>(j, "precision");
  r.threshold = field<double>(j, "threshold");
  return r;
}

std::string render_jsonl(const Header& header, const std::vector<ordered_json>& lines) {
  std::string out = header_to_json(header).dump() + "\n";
  for (const auto& l : lines) out += l.dump() + "\n";
  return out;
}

namespace {

template <typename Record, typename Parse>
Artifact<Record> read_artifact(const std::filesystem::path& path, std::string_view schema, Parse parse,
                               bool tolerate_torn_tail) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw SchemaError(path.string() + ": empty artifact");
  Artifact<Record> art;
  {
    auto j = json::parse(lines[0], nullptr, false);
    if (j.is_discarded()) throw SchemaError(path.string() + ": header is not JSON");
    art.header = header_from_json(j, schema);
  }
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    auto j = json::parse(lines[n], nullptr, false);
    if (j.is_discarded()) {
      const bool last = n + 1 == lines.size();
      if (tolerate_torn_tail && last && !text.ends_with('\n')) {
        spdlog::warn("{}: dropping incomplete final line", path.string());
        break;
      }
      throw ParseError(fmt::format("{} line {}: invalid JSON", path.string(), n + 1), n + 1);
    }
    art.records.push_back(parse(j));
  }
  return art;
}

template <typename Record>
void write_artifact(const std::filesystem::path& path, const Header& header, const std::vector<Record>& rs) {
  std::vector<ordered_json> lines;
  lines.reserve(rs.size());
  for (const auto& r : rs) lines.push_back(to_json(r));
  write_file(path, render_jsonl(header, lines));
}

}  // namespace

Artifact<QueryRecord> read_queries(const std::filesystem::path& path) {
  return read_artifact<QueryRecord>(path, kQueriesSchema, query_from_json, false);
}

Artifact<QuestionRecord> read_questions(const std::filesystem::path& path) {
  return read_artifact<QuestionRecord>(path, kQuestionsSchema, question_from_json, false);
}

Artifact<EvalRecord> read_evals(const std::filesystem::path& path) {
  return read_artifact<EvalRecord>(path, kEvalsSchema, eval_from_json, true);
}

void write_queries(const std::filesystem::path& path, const Header& header, const std::vector<QueryRecord>& rs) {
  write_artifact(path, header, rs);
}

void write_questions(const std::filesystem::path& path, const Header& header,
                     const std::vector<QuestionRecord>& rs) {
  write_artifact(path, header, rs);
}

void write_evals(const std::filesystem::path& path, const Header& header, const std::vector<EvalRecord>& rs) {
  write_artifact(path, header, rs);
}

}  // namespace kgforge::records
