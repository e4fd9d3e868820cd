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

#include "kgforge/config.hpp"

#include "kgforge/common.hpp"
#include "kgforge/util.hpp"

namespace kgforge {

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.set(std::string(key), std::string(trim(t.substr(eq + 1))));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse(read_file(path));
}

std::optional<std::string> ConfigFile::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string config_hash(const std::map<std::string, std::string, std::less<>>& resolved) {
  std::string text;
  for (const auto& [k, v] : resolved) text += k + "=" + v + "\n";
  return sha256_hex(text);
}

}  // namespace kgforge
