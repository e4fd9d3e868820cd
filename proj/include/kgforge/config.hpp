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
#include <optional>
#include <string>
#include <string_view>

namespace kgforge {

/// `key = value` lines; '#' starts a comment line. Keys are case-sensitive.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  /// Throws ConfigError when the file is missing.
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// sha256 over the sorted "key=value\n" lines.
std::string config_hash(const std::map<std::string, std::string, std::less<>>& resolved);

}  // namespace kgforge
