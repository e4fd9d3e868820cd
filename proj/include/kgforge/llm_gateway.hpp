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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "kgforge/common.hpp"

namespace kgforge::llm {

/// Marker that separates reasoning from the final list in CoT answers.
inline constexpr std::string_view kAnswerMarker = "So, my answer to this question is:";

enum class PromptMode { kPlain, kCot };

std::string_view mode_name(PromptMode mode);
PromptMode parse_mode(std::string_view text);

struct Demonstration {
  std::string question;
  std::vector<std::string> answers;
  std::optional<std::string> rationale;
  // Metadata used by demonstration selection and embedding export.
  std::string pattern;
  std::string category;
  std::string id;
};

struct ChatMessage {
  std::string role;
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct Prompt {
  std::string system_instruction;
  std::vector<Demonstration> demonstrations;
  std::string target_question;
  PromptMode mode = PromptMode::kPlain;

  /// Demonstration blocks followed by the target question.
  std::string user_message() const;
  std::vector<ChatMessage> messages() const;
};

std::string_view system_instruction(PromptMode mode);

/// Throws ContractViolation when a CoT demonstration lacks a rationale, a
/// demonstration has no answers, or `expected_shots` disagrees with demos.
Prompt build_prompt(std::string question, std::vector<Demonstration> demos, PromptMode mode,
                    std::optional<std::size_t> expected_shots = std::nullopt);

/// Answers parsed from raw model text: the part after the last answer marker
/// in CoT mode (whole text if absent), split on commas, semicolons and
/// newlines, with list numbering, quotes and trailing periods stripped.
/// Case-insensitive duplicates are dropped; at most 10 are returned.
std::vector<std::string> extract_answers(std::string_view raw, PromptMode mode);

enum class ErrorKind { kTimeout, kApi, kRateLimit, kTransport };

std::string_view error_kind_name(ErrorKind kind);
ErrorKind parse_error_kind(std::string_view text);

struct ClientError {
  ErrorKind kind = ErrorKind::kTransport;
  std::string message;
  int http_status = 0;
};

struct Completion {
  std::string text;
  std::optional<ClientError> error;
  int attempts = 1;
  bool ok() const { return !error.has_value(); }
};

/// Chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string describe() const = 0;
  virtual Completion complete(const Prompt& prompt) = 0;
};

inline Completion complete(CompletionClient& client, const Prompt& prompt) {
  return client.complete(prompt);
}

/// Gold answers keyed by question text.
using AnswerKey = std::map<std::string, std::vector<std::string>, std::less<>>;

/// Replies with the first 10 gold answers as a comma-separated list. In CoT
/// mode the list follows a short reasoning line and the answer marker.
class OracleMockClient : public CompletionClient {
 public:
  explicit OracleMockClient(AnswerKey key) : key_(std::move(key)) {}
  std::string describe() const override { return "mock-oracle"; }
  Completion complete(const Prompt& prompt) override;

 protected:
  const std::vector<std::string>* lookup(std::string_view question) const;
  static std::string render(const std::vector<std::string>& answers, PromptMode mode);

 private:
  AnswerKey key_;
};

/// Oracle reply with `corrupted` of the answers swapped for distractors that
/// share no character with any gold name. Positions are drawn from a stream
/// keyed by (seed, question), so replies do not depend on call order.
class CorruptingMockClient : public OracleMockClient {
 public:
  CorruptingMockClient(AnswerKey key, std::size_t corrupted, std::uint64_t seed)
      : OracleMockClient(std::move(key)), corrupted_(corrupted), seed_(seed) {}
  std::string describe() const override;
  Completion complete(const Prompt& prompt) override;

 private:
  std::size_t corrupted_;
  std::uint64_t seed_;
};

/// Spaces admissions at least 60/rpm seconds apart across all callers.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  /// Blocks until admitted. Returns false without reserving a slot when the
  /// wait would exceed `max_wait`.
  bool acquire(std::chrono::milliseconds max_wait);

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
};

struct HttpClientConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60'000};
  double temperature = 0.0;
  int max_tokens = 1024;
  double requests_per_minute = 60.0;
  RetryPolicy retry;
};

/// Request body for the chat-completion endpoint.
nlohmann::json chat_request_body(const Prompt& prompt, const std::string& model, double temperature,
                                 int max_tokens);

/// Pulls choices[0].message.content out of a response body.
std::optional<std::string> parse_chat_response(std::string_view body);

/// JSON-over-HTTP(S) chat-completion client with exponential backoff on
/// timeouts, transport failures, 429 and 5xx. Other 4xx fail immediately.
class HttpChatClient : public CompletionClient {
 public:
  HttpChatClient(HttpClientConfig config, std::shared_ptr<RateLimiter> limiter);
  std::string describe() const override;
  Completion complete(const Prompt& prompt) override;

 private:
  Completion attempt_once(const std::string& body);

  HttpClientConfig config_;
  std::shared_ptr<RateLimiter> limiter_;
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
};

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

/// Splits "https://host:port/path" into the httplib base and request path.
Endpoint split_endpoint(std::string_view url);

}  // namespace kgforge::llm
