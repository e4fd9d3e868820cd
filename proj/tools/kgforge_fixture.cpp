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


// Writes the synthetic fixture graph and its relation templates.

#include <fmt/format.h>

#include "CLI11.hpp"
#include "support/fixture.hpp"
#include "kgforge/util.hpp"

int main(int argc, char** argv) {
  CLI::App app{"write the synthetic fixture knowledge graph"};
  std::string dir = ".";
  kgforge::testing::FixtureSpec spec;
  app.add_option("--out-dir", dir, "output directory");
  app.add_option("--groups", spec.groups, "entity blocks");
  app.add_option("--group-size", spec.group_size, "entities per block");
  app.add_option("--density", spec.density, "edge probability");
  app.add_option("--seed", spec.seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path out(dir);
  kgforge::write_file(out / "fixture_kg.tsv", kgforge::testing::fixture_tsv(spec));
  kgforge::write_file(out / "fixture_templates.tsv", kgforge::testing::fixture_templates_tsv());
  fmt::print("wrote {} and {}\n", (out / "fixture_kg.tsv").string(), (out / "fixture_templates.tsv").string());
  return 0;
}
