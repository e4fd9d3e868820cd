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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgforge {

inline constexpr const char* kToolVersion = "0.3.0";

/// Dense entity index, assigned in first-seen order at load time.
enum class EntityId : std::uint32_t {};
/// Dense relation index, assigned in first-seen order at load time.
enum class RelationId : std::uint32_t {};

constexpr std::uint32_t index_of(EntityId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index_of(RelationId id) { return static_cast<std::uint32_t>(id); }

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based line number for line-oriented
/// files, or a 0-based character offset for formula strings.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Structurally valid input that violates a load-time rule (name collisions,
/// invalid catalog declarations, bad template rows).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (out-of-range id, k > pool).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Query evaluation refused (standalone negation, entity cap exceeded).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An artifact from an upstream stage has the wrong schema tag.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgforge
