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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kgforge {

// The mt19937_64 output sequence is fixed by the standard; distributions are
// not, so every draw goes through uniform_index to stay bit-exact across
// standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). `bound` must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Uniform real in [0, 1) built from the top 53 bits of one draw.
double uniform_unit(Rng& rng);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Seed for a named sub-stream ("sampling", "demo-random", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

std::string sha256_hex(std::string_view data);
std::string file_sha256_hex(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view text);
std::string ascii_lower(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

/// Splits into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace kgforge
