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

#include "kgforge/cli.hpp"

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "CLI11.hpp"
#include "kgforge/config.hpp"
#include "kgforge/demo_selector.hpp"
#include "kgforge/eval_metrics.hpp"
#include "kgforge/kg_store.hpp"
#include "kgforge/llm_gateway.hpp"
#include "kgforge/query_engine.hpp"
#include "kgforge/query_sampler.hpp"
#include "kgforge/question_gen.hpp"
#include "kgforge/records.hpp"
#include "kgforge/report.hpp"
#include "kgforge/util.hpp"

#ifndef KGFORGE_DEFAULT_DEMOS
#define KGFORGE_DEFAULT_DEMOS "data/demos/default_demos.jsonl"
#endif

namespace kgforge::cli {

namespace {

using Settings = std::map<std::string, std::string, std::less<>>;

// The six basic patterns used for the demonstration pool by default.
constexpr std::string_view kDefaultDemoPatterns =
    "(p,(e));(p,(p,(e)));(i,(p,(e)),(p,(e)));(u,(p,(e)),(p,(e)));(i,(n,(p,(e))),(p,(e)));"
    "(i,(p,(e)),(p,(p,(e))))";

/// Options of one subcommand. Values resolve as default < config file < flag.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& help)
      : app_(parent.add_subcommand(name, help)) {}

  CLI::App* app() const { return app_; }

  void option(const std::string& flags, const std::string& key, std::string fallback, const std::string& help) {
    defaults_[key] = std::move(fallback);
    options_.emplace_back(key, app_->add_option(flags, values_[key], help));
  }

  void flag(const std::string& flags, const std::string& key, const std::string& help) {
    defaults_[key] = "false";
    options_.emplace_back(key, app_->add_flag(flags, flags_[key], help));
  }

  Settings resolve(const ConfigFile* file) const {
    Settings s(defaults_.begin(), defaults_.end());
    if (file) {
      for (auto& [k, v] : s) {
        if (auto value = file->get(k)) v = *value;
      }
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() == 0) continue;
      auto f = flags_.find(key);
      s[key] = f != flags_.end() ? (f->second ? "true" : "false") : values_.at(key);
    }
    return s;
  }

 private:
  CLI::App* app_;
  std::map<std::string, std::string> defaults_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> flags_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

const std::string& str(const Settings& s, std::string_view key) {
  auto it = s.find(key);
  if (it == s.end()) throw ContractViolation("unregistered setting " + std::string(key));
  return it->second;
}

template <typename T>
T number(const Settings& s, std::string_view key) {
  const std::string& text = str(s, key);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("setting '{}' expects a number, got '{}'", key, text));
  }
  return value;
}

double real(const Settings& s, std::string_view key) {
  const std::string& text = str(s, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("setting '{}' expects a real number, got '{}'", key, text));
  }
}

bool boolean(const Settings& s, std::string_view key) {
  const std::string v = ascii_lower(str(s, key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  throw ConfigError(fmt::format("setting '{}' expects true or false, got '{}'", key, v));
}

std::filesystem::path existing_file(const Settings& s, std::string_view key) {
  const std::string& p = str(s, key);
  if (p.empty()) throw ConfigError(fmt::format("missing required setting '{}'", key));
  if (!std::filesystem::is_regular_file(p)) throw ConfigError(fmt::format("{}: no such file: {}", key, p));
  return p;
}

std::filesystem::path required_path(const Settings& s, std::string_view key) {
  const std::string& p = str(s, key);
  if (p.empty()) throw ConfigError(fmt::format("missing required setting '{}'", key));
  return p;
}

void add_kg_options(Command& c) {
  c.option("--kg", "kg", "", "triple file");
  c.option("--format", "format", "tsv-hrt", "tsv-hrt or csv-with-header");
  c.option("--head-column", "head_column", "", "CSV head column");
  c.option("--relation-column", "relation_column", "", "CSV relation column");
  c.option("--tail-column", "tail_column", "", "CSV tail column");
  c.option("--head-category-column", "head_category_column", "", "CSV head category column");
  c.option("--tail-category-column", "tail_category_column", "", "CSV tail category column");
  c.option("--id-map", "id_map", "", "id<TAB>name file");
}

kg::KnowledgeGraph load_kg(const Settings& s, std::map<std::string, std::string>& inputs) {
  const auto path = existing_file(s, "kg");
  kg::LoadOptions opts;
  opts.format = kg::parse_format(str(s, "format"));
  opts.head_column = str(s, "head_column");
  opts.relation_column = str(s, "relation_column");
  opts.tail_column = str(s, "tail_column");
  opts.head_category_column = str(s, "head_category_column");
  opts.tail_category_column = str(s, "tail_category_column");
  if (!str(s, "id_map").empty()) {
    opts.id_map = existing_file(s, "id_map");
    inputs[opts.id_map->string()] = file_sha256_hex(*opts.id_map);
  }
  inputs[path.string()] = file_sha256_hex(path);
  return kg::load_triples(path, opts);
}

std::vector<query::PatternCatalogEntry> load_catalog(const Settings& s, std::map<std::string, std::string>& inputs) {
  if (str(s, "catalog").empty()) return query::default_catalog();
  const auto path = existing_file(s, "catalog");
  inputs[path.string()] = file_sha256_hex(path);
  return query::load_catalog(path);
}

records::Header make_header(std::string_view schema, const Settings& s, std::uint64_t seed,
                            std::map<std::string, std::string> inputs) {
  records::Header h;
  h.schema = std::string(schema);
  h.tool_version = std::string(kToolVersion);
  h.seed = seed;
  // Run-control settings do not change results and stay out of the hash.
  Settings hashed = s;
  for (const char* k : {"workers", "resume", "retry_failed"}) hashed.erase(k);
  h.config_hash = config_hash(hashed);
  h.inputs = std::move(inputs);
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : hashed) cfg[k] = v;
  h.metadata["config"] = cfg;
  return h;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const Settings& s) {
  std::map<std::string, std::string> inputs;
  const auto kg = load_kg(s, inputs);
  const auto stats = kg.stats();
  fmt::print("entities:  {}\nrelations: {}\ntriples:   {}\n", stats.entities, stats.relations, stats.triples);
  for (const auto& r : stats.per_relation) {
    fmt::print("  {:<40} triples={} heads={} tails={}\n", r.name, r.triples, r.distinct_heads, r.distinct_tails);
  }
  if (!str(s, "stats_out").empty()) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["inputs"] = inputs;
    j["entities"] = stats.entities;
    j["relations"] = stats.relations;
    j["triples"] = stats.triples;
    j["per_relation"] = nlohmann::ordered_json::array();
    for (const auto& r : stats.per_relation) {
      nlohmann::ordered_json hist = nlohmann::ordered_json::object();
      for (const auto& [deg, count] : r.out_degree_histogram) hist[std::to_string(deg)] = count;
      j["per_relation"].push_back({{"name", r.name},
                                   {"triples", r.triples},
                                   {"distinct_heads", r.distinct_heads},
                                   {"distinct_tails", r.distinct_tails},
                                   {"out_degree_histogram", hist}});
    }
    write_file(str(s, "stats_out"), j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sample

int cmd_sample(const Settings& s) {
  std::map<std::string, std::string> inputs;
  const auto out = required_path(s, "out");
  const auto kg = load_kg(s, inputs);
  const auto catalog = load_catalog(s, inputs);
  const auto seed = number<std::uint64_t>(s, "seed");

  sampler::SamplerConfig cfg;
  cfg.min_answers = number<std::size_t>(s, "min_answers");
  cfg.max_answers = number<std::size_t>(s, "max_answers");
  cfg.max_retries_per_question = number<std::size_t>(s, "max_retries");
  cfg.questions_per_pattern = number<std::size_t>(s, "questions_per_pattern");
  cfg.seed = derive_seed(seed, "sampling");
  cfg.validate();

  std::vector<sampler::SampledQuery> sampled;
  std::vector<sampler::Shortfall> shortfalls;
  try {
    sampled = sampler::sample_benchmark(kg, catalog, cfg);
  } catch (const sampler::SamplingShortfall& e) {
    sampled = e.partial();
    shortfalls = e.shortfalls();
  }

  std::vector<records::QueryRecord> rows;
  std::vector<std::size_t> ordinal(catalog.size(), 0);
  for (const auto& q : sampled) {
    rows.push_back(records::make_query_record(kg, q, catalog[q.pattern_index], ordinal[q.pattern_index]++));
  }
  auto header = make_header(records::kQueriesSchema, s, seed, inputs);
  header.metadata["catalog_size"] = catalog.size();
  header.metadata["requested"] = catalog.size() * cfg.questions_per_pattern;
  header.metadata["produced"] = rows.size();
  records::write_queries(out, header, rows);
  fmt::print("wrote {} queries ({} patterns x {}) to {}\n", rows.size(), catalog.size(), cfg.questions_per_pattern,
             out.string());
  if (!shortfalls.empty()) {
    fmt::print(stderr, "shortfall in {} pattern(s):\n", shortfalls.size());
    for (const auto& sf : shortfalls) {
      fmt::print(stderr, "  {} produced {}/{}\n", sf.formula, sf.produced, sf.requested);
    }
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- generate

std::string answer_category(const kg::KnowledgeGraph& kg, const query::GroundedNode& node,
                            const qgen::TemplateSet& templates) {
  switch (node.kind) {
    case query::NodeKind::kProjection: {
      const auto* t = templates.find(kg.relation(node.relation).name);
      return t ? t->tail_category : "";
    }
    case query::NodeKind::kIntersection:
    case query::NodeKind::kUnion:
      for (const auto& c : node.children) {
        if (c.kind != query::NodeKind::kNegation) return answer_category(kg, c, templates);
      }
      return "";
    default: return "";
  }
}

std::vector<std::string> names_of(const kg::KnowledgeGraph& kg, const query::AnswerSet& set) {
  std::vector<std::string> out;
  out.reserve(set.size());
  for (EntityId e : set) out.push_back(kg.entity(e).name);
  return out;
}

int cmd_generate(const Settings& s) {
  std::map<std::string, std::string> inputs;
  const auto out = required_path(s, "out");
  const auto kg = load_kg(s, inputs);
  const auto queries_path = existing_file(s, "queries");
  const auto templates_path = existing_file(s, "templates");
  inputs[queries_path.string()] = file_sha256_hex(queries_path);
  inputs[templates_path.string()] = file_sha256_hex(templates_path);
  const auto queries = records::read_queries(queries_path);
  const auto templates = qgen::load_templates(templates_path);
  const bool with_subs = boolean(s, "with_subquestions");

  std::set<std::string> demo_patterns;
  for (auto p : split(str(s, "demo_patterns"), ';')) {
    if (!trim(p).empty()) demo_patterns.insert(query::serialize(query::parse_formula(trim(p))));
  }
  const auto demos_per_pattern = number<std::size_t>(s, "demos_per_pattern");
  std::map<std::string, std::size_t> demo_counts;
  std::vector<llm::Demonstration> demos;

  std::vector<records::QuestionRecord> rows;
  for (const auto& rec : queries.records) {
    const auto grounded = records::bind(kg, rec);
    const auto gold = query::answer(kg, grounded);
    if (names_of(kg, gold) != rec.gold) {
      throw ValidationError(rec.id + ": stored gold answers do not match the graph");
    }
    const auto verbal = qgen::verbalize(kg, grounded, templates);
    records::QuestionRecord q{rec, verbal.text(), verbal.result_index, "main", std::nullopt};
    rows.push_back(q);

    if (!str(s, "demos_out").empty() && demo_patterns.count(rec.formula) &&
        demo_counts[rec.formula] < demos_per_pattern) {
      ++demo_counts[rec.formula];
      llm::Demonstration d;
      d.id = rec.id;
      d.question = q.text;
      d.answers.assign(rec.gold.begin(), rec.gold.begin() + std::min<std::ptrdiff_t>(10, rec.gold.size()));
      d.rationale = qgen::structural_rationale(verbal);
      d.pattern = rec.formula;
      d.category = answer_category(kg, grounded.root(), templates);
      demos.push_back(std::move(d));
    }

    if (!with_subs) continue;
    const auto kind = grounded.root().kind;
    if (kind != query::NodeKind::kIntersection && kind != query::NodeKind::kUnion) continue;
    std::pair<query::GroundedQuery, query::GroundedQuery> parts;
    try {
      parts = qgen::decompose_set_op(grounded);
    } catch (const qgen::NotDecomposable&) {
      continue;
    }
    int part_no = 0;
    for (const auto* part : {&parts.first, &parts.second}) {
      ++part_no;
      const auto shape = part->shape();
      if (shape.kind == query::NodeKind::kEntity) continue;
      records::QueryRecord sub;
      sub.id = fmt::format("{}.{}", rec.id, part_no);
      sub.formula = query::serialize(shape);
      for (RelationId r : part->relations()) sub.relations.push_back(kg.relation(r).name);
      for (EntityId e : part->anchors()) sub.anchors.push_back(kg.entity(e).name);
      sub.gold = names_of(kg, query::answer(kg, *part));
      sub.family = std::string(query::family_name(query::pattern_family(shape)));
      sub.depth = query::reasoning_depth(shape);
      sub.variety = query::operation_variety(shape);
      const auto sub_verbal = qgen::verbalize(kg, *part, templates);
      rows.push_back(records::QuestionRecord{sub, sub_verbal.text(), sub_verbal.result_index, "sub", rec.id});
    }
  }

  auto header = make_header(records::kQuestionsSchema, s, queries.header.seed, inputs);
  header.metadata["queries_config_hash"] = queries.header.config_hash;
  records::write_questions(out, header, rows);
  fmt::print("wrote {} questions to {}\n", rows.size(), out.string());
  if (!str(s, "demos_out").empty()) {
    write_file(str(s, "demos_out"), demo::demonstrations_to_jsonl(demos));
    fmt::print("wrote {} demonstrations to {}\n", demos.size(), str(s, "demos_out"));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

std::unique_ptr<demo::EmbeddingProvider> make_embedder(const Settings& s,
                                                       std::shared_ptr<llm::RateLimiter> limiter) {
  const std::string kind = str(s, "embedder");
  if (kind == "hash") return std::make_unique<demo::HashingEmbedder>();
  if (kind == "http") {
    demo::HttpEmbeddingConfig cfg;
    if (!str(s, "embedding_endpoint").empty()) cfg.endpoint = str(s, "embedding_endpoint");
    if (!str(s, "embedding_model").empty()) cfg.model = str(s, "embedding_model");
    cfg.api_key_env = str(s, "api_key_env");
    cfg.dimension = number<std::size_t>(s, "embedding_dimension");
    return std::make_unique<demo::HttpEmbeddingProvider>(cfg, std::move(limiter));
  }
  throw ConfigError("unknown embedder '" + kind + "' (expected hash or http)");
}

std::unique_ptr<llm::CompletionClient> make_client(const Settings& s, const llm::AnswerKey& key,
                                                   std::uint64_t seed, std::shared_ptr<llm::RateLimiter> limiter) {
  const std::string kind = str(s, "client");
  if (kind == "mock-oracle") return std::make_unique<llm::OracleMockClient>(key);
  if (kind == "mock-corrupt") {
    const auto k = number<std::size_t>(s, "corrupt_k");
    if (k > 10) throw ConfigError("corrupt_k must be at most 10");
    return std::make_unique<llm::CorruptingMockClient>(key, k, derive_seed(seed, "mock-corruption"));
  }
  if (kind == "http") {
    llm::HttpClientConfig cfg;
    if (!str(s, "endpoint").empty()) cfg.endpoint = str(s, "endpoint");
    if (!str(s, "model").empty()) cfg.model = str(s, "model");
    cfg.api_key_env = str(s, "api_key_env");
    cfg.timeout = std::chrono::milliseconds(number<std::int64_t>(s, "timeout_ms"));
    cfg.temperature = real(s, "temperature");
    cfg.max_tokens = number<int>(s, "max_tokens");
    cfg.requests_per_minute = real(s, "rpm");
    cfg.retry.max_retries = number<int>(s, "max_retries");
    return std::make_unique<llm::HttpChatClient>(cfg, std::move(limiter));
  }
  throw ConfigError("unknown client '" + kind + "' (expected mock-oracle, mock-corrupt or http)");
}

metrics::MatchConfig match_config(const Settings& s, metrics::KgProfile& profile) {
  profile = metrics::parse_profile(str(s, "profile"));
  metrics::MatchConfig cfg;
  cfg.threshold = str(s, "threshold").empty() ? metrics::threshold_for(profile) : real(s, "threshold");
  cfg.validate();
  return cfg;
}

int cmd_evaluate(const Settings& s) {
  std::map<std::string, std::string> inputs;
  const auto out = required_path(s, "out");
  const auto questions_path = existing_file(s, "questions");
  inputs[questions_path.string()] = file_sha256_hex(questions_path);
  const auto questions = records::read_questions(questions_path);
  const auto seed = number<std::uint64_t>(s, "seed");
  const auto mode = boolean(s, "cot") ? llm::PromptMode::kCot : llm::PromptMode::kPlain;
  const auto shots = number<std::size_t>(s, "shots");
  const auto strategy = demo::parse_strategy(str(s, "demo_strategy"));
  const auto workers = std::max<std::size_t>(1, number<std::size_t>(s, "workers"));
  metrics::KgProfile profile;
  const auto match = match_config(s, profile);

  std::vector<llm::Demonstration> demos;
  if (shots > 0) {
    const auto demos_path = str(s, "demos").empty() ? std::filesystem::path(KGFORGE_DEFAULT_DEMOS)
                                                    : existing_file(s, "demos");
    if (!std::filesystem::is_regular_file(demos_path)) {
      throw ConfigError("no such demonstration file: " + demos_path.string());
    }
    inputs[demos_path.string()] = file_sha256_hex(demos_path);
    demos = demo::load_demonstrations(demos_path);
    if (demos.size() < shots) {
      throw ConfigError(fmt::format("{} shots requested but the pool has {} demonstrations", shots, demos.size()));
    }
    if (mode == llm::PromptMode::kCot) {
      for (const auto& d : demos) {
        if (!d.rationale) throw ConfigError("chain-of-thought run needs a rationale on every demonstration: " + d.question);
      }
    }
  }

  auto limiter = std::make_shared<llm::RateLimiter>(real(s, "rpm"));
  std::unique_ptr<demo::EmbeddingProvider> embedder;
  demo::DemoPool pool("none", 0);
  const bool by_similarity = strategy == demo::Strategy::kHighest || strategy == demo::Strategy::kLowest;
  if (by_similarity && shots > 0) {
    embedder = make_embedder(s, limiter);
    std::optional<demo::EmbeddingCache> cache;
    if (!str(s, "embedding_cache").empty()) cache.emplace(str(s, "embedding_cache"));
    demo::BuildStats stats;
    pool = demo::build_pool(demos, *embedder, cache ? &*cache : nullptr, &stats);
    spdlog::info("demonstration pool: {} entries, {} provider calls, {} cache hits", pool.size(),
                 stats.provider_calls, stats.cache_hits);
  } else {
    for (auto& d : demos) pool.add(d, {});
  }

  llm::AnswerKey key;
  for (const auto& q : questions.records) key.emplace(q.text, q.query.gold);
  auto client = make_client(s, key, seed, limiter);

  spdlog::info("match threshold {:.2f} (profile {})", match.threshold, metrics::profile_name(profile));

  auto header = make_header(records::kEvalsSchema, s, seed, inputs);
  header.metadata["profile"] = metrics::profile_name(profile);
  header.metadata["threshold"] = match.threshold;
  header.metadata["mode"] = llm::mode_name(mode);
  header.metadata["shots"] = shots;
  header.metadata["strategy"] = demo::strategy_name(strategy);
  header.metadata["client"] = client->describe();
  header.metadata["system_instruction"] = llm::system_instruction(mode);
  header.metadata["questions_config_hash"] = questions.header.config_hash;

  // Resume: keep finished records from an earlier run with the same config.
  std::map<std::string, records::EvalRecord> done;
  if (boolean(s, "resume") && std::filesystem::exists(out)) {
    const auto previous = records::read_evals(out);
    if (previous.header.config_hash != header.config_hash) {
      throw Error(out.string() + " was written with a different configuration; pass --resume false or a new --out");
    }
    const bool retry_failed = boolean(s, "retry_failed");
    for (const auto& r : previous.records) {
      if (retry_failed && r.error_kind) continue;
      done.emplace(r.question_id, r);
    }
    spdlog::info("resuming: {} of {} questions already evaluated", done.size(), questions.records.size());
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < questions.records.size(); ++i) {
    if (!done.count(questions.records[i].query.id)) todo.push_back(i);
  }

  // Progress is appended as records complete so an interrupted run resumes.
  std::ofstream journal;
  if (done.empty()) {
    write_file(out, records::header_to_json(header).dump() + "\n");
  } else {
    std::vector<records::EvalRecord> kept;
    for (const auto& q : questions.records) {
      if (auto it = done.find(q.query.id); it != done.end()) kept.push_back(it->second);
    }
    records::write_evals(out, header, kept);
  }
  journal.open(out, std::ios::app | std::ios::binary);

  const std::uint64_t demo_seed = derive_seed(seed, "demo-random");
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const auto& q = questions.records[todo[t]];
      try {
        records::EvalRecord r;
        r.question_id = q.query.id;
        r.formula = q.query.formula;
        r.family = q.query.family;
        r.depth = q.query.depth;
        r.variety = q.query.variety;
        r.role = q.role;
        r.parent = q.parent;
        r.gold_size = q.query.gold.size();
        r.mode = std::string(llm::mode_name(mode));
        r.shots = shots;
        r.strategy = std::string(demo::strategy_name(strategy));
        r.threshold = match.threshold;

        std::vector<llm::Demonstration> chosen;
        if (shots > 0) {
          Rng rng(derive_seed(demo_seed, q.query.id));
          std::vector<double> target;
          if (by_similarity) target = embedder->embed(q.text);
          for (std::size_t i : demo::select_indices(pool, q.text, target, shots, strategy, rng)) {
            chosen.push_back(pool[i].demo);
            r.demo_ids.push_back(pool[i].demo.id.empty() ? fmt::format("pool-{}", i) : pool[i].demo.id);
          }
        }
        const auto prompt = llm::build_prompt(q.text, std::move(chosen), mode, shots);
        r.system_prompt = prompt.system_instruction;
        r.user_prompt = prompt.user_message();
        const auto completion = llm::complete(*client, prompt);
        r.attempts = completion.attempts;
        r.raw = completion.text;
        if (!completion.ok()) {
          r.error_kind = std::string(llm::error_kind_name(completion.error->kind));
          r.error_message = completion.error->message;
        } else {
          r.extracted = llm::extract_answers(completion.text, mode);
        }
        const auto outcome = metrics::precision_at_10(r.extracted, q.query.gold, match);
        for (const auto& m : outcome.matches) r.matches.push_back(records::MatchRecord{m.answer, m.best_score, m.matched_gold});
        r.matched = outcome.matched;
        r.precision = outcome.precision;

        std::lock_guard lock(mu);
        journal << records::to_json(r).dump() << '\n';
        journal.flush();
        done.emplace(r.question_id, std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = todo.size();
      }
    }
  };
  std::vector<std::thread> pool_threads;
  for (std::size_t w = 0; w < std::min(workers, std::max<std::size_t>(1, todo.size())); ++w) pool_threads.emplace_back(work);
  for (auto& t : pool_threads) t.join();
  journal.close();
  if (failure) std::rethrow_exception(failure);

  // Final file in question order, independent of worker scheduling.
  std::vector<records::EvalRecord> ordered;
  std::size_t errors = 0;
  double sum = 0.0;
  for (const auto& q : questions.records) {
    const auto& r = done.at(q.query.id);
    if (r.error_kind) ++errors;
    sum += r.precision;
    ordered.push_back(r);
  }
  records::write_evals(out, header, ordered);
  fmt::print("evaluated {} questions ({} new, {} errors), mean precision@10 {:.4f}\n", ordered.size(), todo.size(),
             errors, ordered.empty() ? 0.0 : sum / static_cast<double>(ordered.size()));
  fmt::print("match threshold {:.2f} (profile {})\n", match.threshold, metrics::profile_name(profile));
  return kExitOk;
}

// ---------------------------------------------------------------- report

std::string describe_run(const records::Header& h) {
  const auto& m = h.metadata;
  return fmt::format("match threshold {:.2f} (profile {}); mode {}, shots {}, strategy {}, client {}",
                     m.value("threshold", 0.0), m.value("profile", std::string("?")),
                     m.value("mode", std::string("?")), m.value("shots", 0), m.value("strategy", std::string("?")),
                     m.value("client", std::string("?")));
}

int cmd_report(const Settings& s) {
  std::map<std::string, std::string> inputs;
  const auto catalog = load_catalog(s, inputs);
  const auto base = records::read_evals(existing_file(s, "evals"));
  const std::string label = str(s, "label").empty() ? base.header.metadata.value("client", std::string("run"))
                                                    : str(s, "label");
  const auto base_report = metrics::aggregate(report::main_items(base.records), catalog);

  std::string text = describe_run(base.header) + "\n\n";
  text += report::format_main_table(base_report, label) + "\n";
  text += report::format_pattern_table(base_report, catalog) + "\n";
  const auto set_ops = report::set_op_table(base.records);
  if (set_ops.intersection.questions || set_ops.union_.questions) {
    text += "set operation test (sub-questions before vs whole question after)\n";
    text += report::format_set_op_table(set_ops, label) + "\n";
  }
  std::string csv = report::main_table_csv(base_report, label);

  if (!str(s, "compare").empty()) {
    const auto other = records::read_evals(existing_file(s, "compare"));
    const auto other_report = metrics::aggregate(report::main_items(other.records), catalog);
    const std::string other_label = other.header.metadata.value("mode", std::string("compare")) + " " +
                                    other.header.metadata.value("client", std::string(""));
    text += "compared run: " + describe_run(other.header) + "\n\n";
    text += report::format_main_table(other_report, other_label) + "\n";
    text += "operation variety deltas (compared minus base)\n";
    text += report::format_variety_deltas(base_report, other_report, other_label);
    const auto csv_other = report::main_table_csv(other_report, other_label);
    csv += csv_other.substr(csv_other.find('\n') + 1);
  }

  fmt::print("{}", text);
  if (!str(s, "out").empty()) write_file(str(s, "out"), text);
  if (!str(s, "csv_out").empty()) write_file(str(s, "csv_out"), csv);
  return kExitOk;
}

void configure_logging(const std::string& level) {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("kgforge");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  });
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"kgforge: complex logical question benchmark pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::string log_level = "info";
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  Command ingest(app, "ingest", "load and validate a triple file, print statistics");
  add_kg_options(ingest);
  ingest.option("--stats-out", "stats_out", "", "write statistics as JSON");

  Command sample(app, "sample", "sample grounded queries for every catalog pattern");
  add_kg_options(sample);
  sample.option("--catalog", "catalog", "", "pattern catalog (default: built-in 26 patterns)");
  sample.option("--seed", "seed", "0", "root seed");
  sample.option("--questions-per-pattern", "questions_per_pattern", "100", "quota per pattern");
  sample.option("--min-answers", "min_answers", "10", "smallest accepted gold set");
  sample.option("--max-answers", "max_answers", "200", "largest accepted gold set");
  sample.option("--max-retries", "max_retries", "500", "attempts per accepted query");
  sample.option("--out", "out", "", "queries JSON-lines output");

  Command generate(app, "generate", "verbalize sampled queries into questions");
  add_kg_options(generate);
  generate.option("--queries", "queries", "", "queries JSON-lines input");
  generate.option("--templates", "templates", "", "relation template file");
  generate.option("--out", "out", "", "questions JSON-lines output");
  generate.flag("--with-subquestions", "with_subquestions", "also emit the two operand questions of i/u roots");
  generate.option("--demos-out", "demos_out", "", "write a demonstration pool from the questions");
  generate.option("--demo-patterns", "demo_patterns", std::string(kDefaultDemoPatterns),
                  "';'-separated pool patterns");
  generate.option("--demos-per-pattern", "demos_per_pattern", "1000", "pool entries per pattern");

  Command evaluate(app, "evaluate", "prompt a model with every question and score the answers");
  evaluate.option("--questions", "questions", "", "questions JSON-lines input");
  evaluate.option("--out", "out", "", "evaluation JSON-lines output");
  evaluate.option("--seed", "seed", "0", "root seed");
  evaluate.option("--client", "client", "mock-oracle", "mock-oracle, mock-corrupt or http");
  evaluate.option("--corrupt-k", "corrupt_k", "0", "answers replaced by mock-corrupt");
  evaluate.flag("--cot", "cot", "chain-of-thought prompting");
  evaluate.option("--shots", "shots", "2", "demonstrations per prompt");
  evaluate.option("--demos", "demos", "", "demonstration pool JSON-lines");
  evaluate.option("--demo-strategy", "demo_strategy", "fixed", "fixed, highest, random or lowest");
  evaluate.option("--embedder", "embedder", "hash", "hash or http");
  evaluate.option("--embedding-cache", "embedding_cache", "", "embedding cache directory");
  evaluate.option("--embedding-endpoint", "embedding_endpoint", "", "embedding endpoint URL");
  evaluate.option("--embedding-model", "embedding_model", "", "embedding model name");
  evaluate.option("--embedding-dimension", "embedding_dimension", "1536", "embedding size for http");
  evaluate.option("--profile", "profile", "general", "general or biomedical");
  evaluate.option("--threshold", "threshold", "", "override the profile's match threshold");
  evaluate.option("--workers", "workers", "4", "concurrent requests");
  evaluate.option("--endpoint", "endpoint", "", "chat-completion endpoint URL");
  evaluate.option("--model", "model", "", "model name");
  evaluate.option("--api-key-env", "api_key_env", "OPENAI_API_KEY", "environment variable with the API key");
  evaluate.option("--timeout-ms", "timeout_ms", "60000", "request timeout");
  evaluate.option("--temperature", "temperature", "0.0", "decoding temperature");
  evaluate.option("--max-tokens", "max_tokens", "1024", "completion token limit");
  evaluate.option("--rpm", "rpm", "60", "requests per minute");
  evaluate.option("--max-retries", "max_retries", "3", "retries per request");
  evaluate.option("--resume", "resume", "true", "skip questions already in --out");
  evaluate.flag("--retry-failed", "retry_failed", "re-run questions whose earlier attempt failed");

  Command report_cmd(app, "report", "aggregate evaluation records into tables");
  report_cmd.option("--evals", "evals", "", "evaluation JSON-lines input");
  report_cmd.option("--compare", "compare", "", "second evaluation run (e.g. CoT) for variety deltas");
  report_cmd.option("--catalog", "catalog", "", "pattern catalog (default: built-in)");
  report_cmd.option("--label", "label", "", "row label");
  report_cmd.option("--out", "out", "", "also write the text report here");
  report_cmd.option("--csv-out", "csv_out", "", "write the main table as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    configure_logging(log_level);
    std::optional<ConfigFile> file;
    if (!config_path.empty()) file = ConfigFile::load(config_path);
    const ConfigFile* cfg = file ? &*file : nullptr;
    if (ingest.app()->parsed()) return cmd_ingest(ingest.resolve(cfg));
    if (sample.app()->parsed()) return cmd_sample(sample.resolve(cfg));
    if (generate.app()->parsed()) return cmd_generate(generate.resolve(cfg));
    if (evaluate.app()->parsed()) return cmd_evaluate(evaluate.resolve(cfg));
    if (report_cmd.app()->parsed()) return cmd_report(report_cmd.resolve(cfg));
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace kgforge::cli
