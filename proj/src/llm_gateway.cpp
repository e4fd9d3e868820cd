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

#include "kgforge/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <thread>
#include <unordered_set>

#include "kgforge/util.hpp"

namespace kgforge::llm {

std::string_view mode_name(PromptMode mode) { return mode == PromptMode::kPlain ? "plain" : "cot"; }

PromptMode parse_mode(std::string_view text) {
  const std::string lower = ascii_lower(trim(text));
  if (lower == "plain") return PromptMode::kPlain;
  if (lower == "cot") return PromptMode::kCot;
  throw ConfigError("unknown prompt mode '" + std::string(text) + "' (expected plain or cot)");
}

std::string_view system_instruction(PromptMode mode) {
  if (mode == PromptMode::kPlain) {
    return "You answer questions about sets of entities that are described step by step. "
           "Reply with exactly 10 entity names from the requested set as one comma-separated "
           "list and nothing else.";
  }
  return "You answer questions about sets of entities that are described step by step. "
         "First reason about each entity set in order. Then write \"So, my answer to this "
         "question is:\" on its own line, followed by exactly 10 entity names from the requested "
         "set as one comma-separated list.";
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string Prompt::user_message() const {
  std::string out;
  for (const auto& demo : demonstrations) {
    out += "Question:\n" + demo.question + "\nAnswer:\n";
    if (mode == PromptMode::kCot) {
      out += *demo.rationale;
      out += "\n";
      out += kAnswerMarker;
      out += "\n";
    }
    out += join(demo.answers, ", ") + "\n\n";
  }
  out += "Question:\n" + target_question + "\nAnswer:\n";
  return out;
}

std::vector<ChatMessage> Prompt::messages() const {
  return {ChatMessage{"system", system_instruction}, ChatMessage{"user", user_message()}};
}

Prompt build_prompt(std::string question, std::vector<Demonstration> demos, PromptMode mode,
                    std::optional<std::size_t> expected_shots) {
  if (expected_shots && *expected_shots != demos.size()) {
    throw ContractViolation("expected " + std::to_string(*expected_shots) + " demonstrations, got " +
                            std::to_string(demos.size()));
  }
  for (const auto& d : demos) {
    if (d.answers.empty()) throw ContractViolation("demonstration without answers: " + d.question);
    if (mode == PromptMode::kCot && (!d.rationale || trim(*d.rationale).empty())) {
      throw ContractViolation("chain-of-thought prompts need a rationale on every demonstration");
    }
  }
  Prompt p;
  p.system_instruction = std::string(system_instruction(mode));
  p.demonstrations = std::move(demos);
  p.target_question = std::move(question);
  p.mode = mode;
  return p;
}

namespace {

bool starts_with_at(std::string_view text, std::size_t pos, std::string_view token) {
  return text.substr(pos, token.size()) == token;
}

std::string_view strip_numbering(std::string_view item) {
  item = trim(item);
  std::size_t i = 0;
  while (i < item.size() && std::isdigit(static_cast<unsigned char>(item[i]))) ++i;
  if (i > 0 && i < item.size() && (item[i] == '.' || item[i] == ')')) {
    return trim(item.substr(i + 1));
  }
  if (!item.empty() && (item.front() == '-' || item.front() == '*')) return trim(item.substr(1));
  if (starts_with_at(item, 0, "•")) return trim(item.substr(3));
  return item;
}

std::string_view strip_quotes(std::string_view item) {
  static constexpr std::string_view kQuotes[] = {"\"", "'", "`", "“", "”", "‘", "’"};
  bool changed = true;
  while (changed && !item.empty()) {
    changed = false;
    for (std::string_view q : kQuotes) {
      if (item.size() >= q.size() && item.substr(0, q.size()) == q) {
        item.remove_prefix(q.size());
        changed = true;
      }
      if (item.size() >= q.size() && item.substr(item.size() - q.size()) == q) {
        item.remove_suffix(q.size());
        changed = true;
      }
    }
    item = trim(item);
  }
  return item;
}

}  // namespace

std::vector<std::string> extract_answers(std::string_view raw, PromptMode mode) {
  std::string_view body = raw;
  if (mode == PromptMode::kCot) {
    static const std::string needle = "my answer to this question is";
    const std::string lower = ascii_lower(raw);
    const auto pos = lower.rfind(needle);
    if (pos != std::string::npos) {
      body = raw.substr(pos + needle.size());
      body = trim(body);
      if (!body.empty() && body.front() == ':') body.remove_prefix(1);
    }
  }

  std::vector<std::string> answers;
  std::unordered_set<std::string> seen;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size() && answers.size() < 10; ++i) {
    if (i < body.size() && body[i] != ',' && body[i] != ';' && body[i] != '\n') continue;
    std::string_view item = strip_quotes(strip_numbering(body.substr(start, i - start)));
    while (!item.empty() && item.back() == '.') item.remove_suffix(1);
    item = strip_quotes(item);
    start = i + 1;
    if (item.empty()) continue;
    if (!seen.insert(ascii_lower(item)).second) continue;
    answers.emplace_back(item);
  }
  return answers;
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kApi: return "api";
    case ErrorKind::kRateLimit: return "rate-limit";
    case ErrorKind::kTransport: return "transport";
  }
  return "transport";
}

ErrorKind parse_error_kind(std::string_view text) {
  for (ErrorKind k : {ErrorKind::kTimeout, ErrorKind::kApi, ErrorKind::kRateLimit, ErrorKind::kTransport}) {
    if (text == error_kind_name(k)) return k;
  }
  throw SchemaError("unknown error kind '" + std::string(text) + "'");
}

const std::vector<std::string>* OracleMockClient::lookup(std::string_view question) const {
  auto it = key_.find(question);
  return it == key_.end() ? nullptr : &it->second;
}

std::string OracleMockClient::render(const std::vector<std::string>& answers, PromptMode mode) {
  std::string list = join(answers, ", ");
  if (mode == PromptMode::kPlain) return list;
  return "I work through each entity set in the order the question introduces them.\n" +
         std::string(kAnswerMarker) + "\n" + list;
}

Completion OracleMockClient::complete(const Prompt& prompt) {
  const auto* gold = lookup(prompt.target_question);
  if (!gold) return Completion{"", ClientError{ErrorKind::kApi, "mock has no answer for this question", 404}};
  std::vector<std::string> first(gold->begin(), gold->begin() + std::min<std::ptrdiff_t>(10, gold->size()));
  return Completion{render(first, prompt.mode), std::nullopt};
}

std::string CorruptingMockClient::describe() const {
  return "mock-corrupt(k=" + std::to_string(corrupted_) + ")";
}

Completion CorruptingMockClient::complete(const Prompt& prompt) {
  const auto* gold = lookup(prompt.target_question);
  if (!gold) return Completion{"", ClientError{ErrorKind::kApi, "mock has no answer for this question", 404}};
  std::vector<std::string> answers(gold->begin(), gold->begin() + std::min<std::ptrdiff_t>(10, gold->size()));

  std::set<char> used;
  for (const auto& g : *gold) {
    for (char c : ascii_lower(g)) used.insert(c);
  }
  char filler = 0;
  for (char c : std::string_view("qxzjkwvy0123456789")) {
    if (!used.count(c)) {
      filler = c;
      break;
    }
  }
  if (filler == 0) {
    return Completion{"", ClientError{ErrorKind::kApi, "no distractor alphabet left for this question", 0}};
  }

  Rng rng(derive_seed(seed_, prompt.target_question));
  std::vector<std::size_t> positions(answers.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  for (std::size_t i = positions.size(); i > 1; --i) std::swap(positions[i - 1], positions[uniform_index(rng, i)]);
  const std::size_t k = std::min(corrupted_, answers.size());
  for (std::size_t i = 0; i < k; ++i) answers[positions[i]] = std::string(i + 1, filler);
  return Completion{render(answers, prompt.mode), std::nullopt};
}

RateLimiter::RateLimiter(double requests_per_minute) {
  if (!(requests_per_minute > 0.0)) throw ConfigError("rate limit must be positive");
  interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / requests_per_minute));
}

bool RateLimiter::acquire(std::chrono::milliseconds max_wait) {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    if (slot - now > max_wait) return false;
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
  return true;
}

nlohmann::json chat_request_body(const Prompt& prompt, const std::string& model, double temperature,
                                 int max_tokens) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : prompt.messages()) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", model}, {"messages", messages}, {"temperature", temperature}, {"max_tokens", max_tokens}};
}

std::optional<std::string> parse_chat_response(std::string_view body) {
  auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded()) return std::nullopt;
  try {
    return json.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

Endpoint split_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("endpoint must start with http:// or https://");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace kgforge::llm
