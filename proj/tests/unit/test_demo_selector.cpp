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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "kgforge/demo_selector.hpp"
#include "kgforge/query_ast.hpp"
#include "kgforge/util.hpp"

namespace kgforge::demo {
namespace {

namespace fs = std::filesystem;

// Looks vectors up in a table; counts calls; can fail or misreport size.
class TableProvider : public EmbeddingProvider {
 public:
  TableProvider(std::size_t dim, std::map<std::string, std::vector<double>, std::less<>> table)
      : dim_(dim), table_(std::move(table)) {}
  std::string id() const override { return "table"; }
  std::size_t dimension() const override { return dim_; }
  std::vector<double> embed(std::string_view text) override {
    ++calls;
    if (failing.count(std::string(text))) throw Error("provider down for " + std::string(text));
    auto it = table_.find(text);
    if (it == table_.end()) throw Error("no vector for " + std::string(text));
    return it->second;
  }
  std::size_t calls = 0;
  std::set<std::string> failing;

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<double>, std::less<>> table_;
};

llm::Demonstration demo(std::string q, std::string id = "") {
  llm::Demonstration d;
  d.question = std::move(q);
  d.answers = {"x"};
  d.id = std::move(id);
  d.pattern = "(p,(e))";
  d.category = "films";
  return d;
}

fs::path scratch(std::string_view name) {
  auto dir = fs::temp_directory_path() / ("kgforge_demo_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// +x, +y, -x, -y, +z around a target at +x
DemoPool toy_pool() {
  DemoPool pool("toy", 3);
  pool.add(demo("east"), {1, 0, 0});
  pool.add(demo("north"), {0, 1, 0});
  pool.add(demo("west"), {-1, 0, 0});
  pool.add(demo("south"), {0, -1, 0});
  pool.add(demo("up"), {0, 0, 1});
  return pool;
}

std::vector<std::string> questions(const DemoPool& pool, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(pool[i].demo.question);
  return out;
}

TEST(DemoSelector, Cosine) {
  const std::vector<double> a{1, 2, 3}, b{-2, 1, 0}, z{0, 0, 0};
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  EXPECT_NEAR(cosine(a, b), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(cosine(a, z), 0.0);
}

TEST(DemoSelector, OrthogonalToyPool) {
  const auto pool = toy_pool();
  Rng rng(1);
  const std::vector<double> target{1, 0, 0};
  EXPECT_EQ(questions(pool, select_indices(pool, "q", target, 1, Strategy::kHighest, rng)),
            (std::vector<std::string>{"east"}));
  EXPECT_EQ(questions(pool, select_indices(pool, "q", target, 1, Strategy::kLowest, rng)),
            (std::vector<std::string>{"west"}));
  // the three orthogonal entries tie at 0 and keep pool order
  EXPECT_EQ(questions(pool, select_indices(pool, "q", target, 3, Strategy::kHighest, rng)),
            (std::vector<std::string>{"east", "north", "south"}));
  EXPECT_EQ(questions(pool, select_indices(pool, "q", target, 2, Strategy::kFixed, rng)),
            (std::vector<std::string>{"east", "north"}));
}

TEST(DemoSelector, TargetTextIsExcluded) {
  const auto pool = toy_pool();
  Rng rng(1);
  const std::vector<double> target{1, 0, 0};
  EXPECT_EQ(questions(pool, select_indices(pool, "east", target, 1, Strategy::kHighest, rng)),
            (std::vector<std::string>{"north"}));
  EXPECT_EQ(select_indices(pool, "east", target, 4, Strategy::kFixed, rng).size(), 4u);
  EXPECT_THROW(select_indices(pool, "east", target, 5, Strategy::kHighest, rng), ContractViolation);
  EXPECT_THROW(select_indices(pool, "q", target, 6, Strategy::kRandom, rng), ContractViolation);
}

TEST(DemoSelector, RandomIsReproducible) {
  const auto pool = toy_pool();
  const std::vector<double> target{1, 0, 0};
  Rng a(77), b(77);
  const auto x = select_indices(pool, "q", target, 3, Strategy::kRandom, a);
  EXPECT_EQ(x, select_indices(pool, "q", target, 3, Strategy::kRandom, b));
  EXPECT_EQ(std::set<std::size_t>(x.begin(), x.end()).size(), 3u);
}

TEST(DemoSelector, RandomIsRoughlyUniform) {
  const auto pool = toy_pool();
  const std::vector<double> target{1, 0, 0};
  Rng rng(5);
  std::vector<int> hits(pool.size());
  for (int i = 0; i < 5000; ++i) {
    for (auto j : select_indices(pool, "q", target, 2, Strategy::kRandom, rng)) ++hits[j];
  }
  for (int h : hits) EXPECT_NEAR(h, 2000, 200);
}

TEST(DemoSelector, StrategyNames) {
  for (auto s : {Strategy::kFixed, Strategy::kHighest, Strategy::kRandom, Strategy::kLowest}) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  }
  EXPECT_THROW(parse_strategy("median"), ConfigError);
}

TEST(DemoSelector, PoolRejectsWrongDimension) {
  DemoPool pool("toy", 3);
  EXPECT_THROW(pool.add(demo("a"), {1, 2}), ValidationError);
  TableProvider bad(3, {{"a", {1, 2}}});
  EXPECT_THROW(build_pool({demo("a")}, bad), ValidationError);
}

TEST(DemoSelector, WarmCacheMakesNoCalls) {
  const auto dir = scratch("cache");
  TableProvider p(2, {{"a", {1, 0}}, {"b", {0.25, 1e-17}}});
  EmbeddingCache cache(dir);
  BuildStats cold, warm;
  const auto first = build_pool({demo("a"), demo("b")}, p, &cache, &cold);
  EXPECT_EQ(cold.provider_calls, 2u);
  EXPECT_EQ(p.calls, 2u);
  const auto second = build_pool({demo("a"), demo("b")}, p, &cache, &warm);
  EXPECT_EQ(p.calls, 2u);
  EXPECT_EQ(warm.provider_calls, 0u);
  EXPECT_EQ(warm.cache_hits, 2u);
  // values survive the text round trip bit-exactly
  EXPECT_EQ(second[1].vector, first[1].vector);
  EXPECT_NE(cache.path_for("table", "a"), cache.path_for("other", "a"));
  fs::remove_all(dir);
}

TEST(DemoSelector, ProviderFailuresYieldPartialPool) {
  TableProvider p(2, {{"a", {1, 0}}, {"b", {0, 1}}, {"c", {1, 1}}});
  p.failing = {"b"};
  try {
    build_pool({demo("a"), demo("b"), demo("c")}, p);
    FAIL();
  } catch (const PartialPoolError& e) {
    EXPECT_EQ(e.partial().size(), 2u);
    ASSERT_EQ(e.failures().size(), 1u);
    EXPECT_NE(e.failures()[0].find("b"), std::string::npos);
  }
}

TEST(DemoSelector, HashingEmbedderIsDeterministicAndNormalized) {
  HashingEmbedder h;
  EXPECT_EQ(h.dimension(), 256u);
  const auto a = h.embed("The entity set v1 contains films.");
  EXPECT_EQ(a, h.embed("The entity set v1 contains films."));
  double sq = 0;
  for (double x : a) sq += x * x;
  EXPECT_NEAR(sq, 1.0, 1e-12);
  // near-duplicates are closer than unrelated text
  const auto b = h.embed("The entity set v2 contains films.");
  const auto c = h.embed("Please name ten rivers in Europe");
  EXPECT_GT(cosine(a, b), cosine(a, c));
  EXPECT_EQ(h.id(), "hash-3gram-256");
}

TEST(DemoSelector, ExportRoundTrip) {
  const auto dir = scratch("export");
  DemoPool pool("toy", 3);
  pool.add(demo("q, with \"quotes\"", "d-1"), {0.1, -2.5e-7, 3.0});
  pool.add(demo("plain"), {1.0 / 3.0, 2.0, 0.0});
  export_embeddings(pool, dir / "e.csv");
  const auto rows = read_embeddings_csv(dir / "e.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].id, "d-1");
  EXPECT_EQ(rows[1].id, "d1");
  EXPECT_EQ(rows[0].pattern, "(p,(e))");
  EXPECT_EQ(rows[0].category, "films");
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(rows[i].vector[d], pool[i].vector[d], 1e-9);
  }
  const std::string text = read_file(dir / "e.csv");
  const auto lines = split_lines(text);
  EXPECT_EQ(lines[0], "id,pattern,category,v0,v1,v2");
  fs::remove_all(dir);
}

TEST(DemoSelector, EmptyPoolExportsHeaderOnly) {
  const auto dir = scratch("empty");
  export_embeddings(DemoPool("toy", 2), dir / "e.csv");
  EXPECT_EQ(read_file(dir / "e.csv"), "id,pattern,category,v0,v1\n");
  EXPECT_TRUE(read_embeddings_csv(dir / "e.csv").empty());
  write_file(dir / "bad.csv", "name,x\n");
  EXPECT_THROW(read_embeddings_csv(dir / "bad.csv"), SchemaError);
  fs::remove_all(dir);
}

TEST(DemoSelector, DemonstrationJsonlRoundTrip) {
  std::vector<llm::Demonstration> demos{demo("Q1", "a"), demo("Q2", "b")};
  demos[1].rationale = "because";
  demos[1].answers = {"m", "n"};
  const auto back = parse_demonstrations(demonstrations_to_jsonl(demos));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "b");
  EXPECT_EQ(back[1].rationale, "because");
  EXPECT_FALSE(back[0].rationale.has_value());
  EXPECT_EQ(back[1].answers, (std::vector<std::string>{"m", "n"}));
  EXPECT_THROW(parse_demonstrations("{\"question\":\"q\"}\n"), ParseError);
}

TEST(DemoSelector, ShippedDefaultsAllHaveRationales) {
  const auto demos = load_demonstrations(std::string(KGFORGE_SOURCE_DIR) + "/data/demos/default_demos.jsonl");
  ASSERT_EQ(demos.size(), 6u);
  for (const auto& d : demos) {
    EXPECT_TRUE(d.rationale.has_value()) << d.id;
    EXPECT_GE(d.answers.size(), 4u) << d.id;
    EXPECT_EQ(query::serialize(query::parse_formula(d.pattern)), d.pattern);
  }
}

TEST(DemoSelector, SixThousandEntryPool) {
  std::vector<llm::Demonstration> qs;
  for (int i = 0; i < 6000; ++i) qs.push_back(demo("question number " + std::to_string(i)));
  HashingEmbedder h(64, 3);
  BuildStats stats;
  const auto pool = build_pool(qs, h, nullptr, &stats);
  EXPECT_EQ(pool.size(), 6000u);
  EXPECT_EQ(stats.provider_calls, 6000u);
  EXPECT_EQ(pool.matrix().size(), 6000u * 64u);
  Rng rng(1);
  const auto target = h.embed("question number 4242");
  const auto top = select_indices(pool, "question number 4242", target, 4, Strategy::kHighest, rng);
  ASSERT_EQ(top.size(), 4u);
  for (auto i : top) EXPECT_NE(pool[i].demo.question, "question number 4242");
}

// Properties over random pools.
TEST(DemoSelectorProperty, HighestIsSortedAndExact) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + uniform_index(rng, 6);
    const std::size_t n = 5 + uniform_index(rng, 40);
    DemoPool pool("r", dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = uniform_unit(rng) * 2 - 1;
      pool.add(demo("d" + std::to_string(i)), v);
    }
    std::vector<double> t(dim);
    for (auto& x : t) x = uniform_unit(rng) * 2 - 1;
    const std::size_t k = 1 + uniform_index(rng, 4);
    const auto top = select_indices(pool, "t", t, k, Strategy::kHighest, rng);
    const auto bottom = select_indices(pool, "t", t, k, Strategy::kLowest, rng);
    // brute force ranking
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < n; ++i) ranked.emplace_back(cosine(pool[i].vector, t), i);
    std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; j < k; ++j) ASSERT_EQ(top[j], ranked[j].second);
    std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t j = 0; j < k; ++j) ASSERT_EQ(bottom[j], ranked[j].second);

    // positive rescaling keeps the selection
    DemoPool scaled("r", dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = pool[i].vector;
      const double c = 0.01 + 100 * uniform_unit(rng);
      for (auto& x : v) x *= c;
      scaled.add(pool[i].demo, v);
    }
    ASSERT_EQ(select_indices(scaled, "t", t, k, Strategy::kHighest, rng), top);
  }
}

}  // namespace
}  // namespace kgforge::demo
