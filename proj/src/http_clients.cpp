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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

#include "kgforge/demo_selector.hpp"
#include "kgforge/llm_gateway.hpp"

namespace kgforge::llm {

HttpChatClient::HttpChatClient(HttpClientConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  Endpoint ep = split_endpoint(config_.endpoint);
  scheme_host_port_ = std::move(ep.scheme_host_port);
  path_ = std::move(ep.path);
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
  if (!limiter_) limiter_ = std::make_shared<RateLimiter>(config_.requests_per_minute);
  if (!config_.retry.sleep) {
    config_.retry.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string HttpChatClient::describe() const { return "http(" + config_.model + ")"; }

Completion HttpChatClient::attempt_once(const std::string& body) {
  // A client per attempt keeps concurrent callers independent.
  httplib::Client cli(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const ErrorKind kind = err == httplib::Error::Read || err == httplib::Error::Write ||
                                   err == httplib::Error::ConnectionTimeout
                               ? ErrorKind::kTimeout
                               : ErrorKind::kTransport;
    return Completion{"", ClientError{kind, httplib::to_string(err), 0}};
  }
  if (res->status == 429) {
    return Completion{"", ClientError{ErrorKind::kRateLimit, "HTTP 429: " + res->body.substr(0, 200), 429}};
  }
  if (res->status < 200 || res->status >= 300) {
    return Completion{"", ClientError{ErrorKind::kApi, "HTTP " + std::to_string(res->status) + ": " +
                                                            res->body.substr(0, 200),
                                      res->status}};
  }
  auto text = parse_chat_response(res->body);
  if (!text) return Completion{"", ClientError{ErrorKind::kApi, "malformed response body", res->status}};
  return Completion{*text, std::nullopt};
}

namespace {

bool retryable(const ClientError& e) {
  if (e.kind == ErrorKind::kApi) return e.http_status >= 500;
  return true;
}

}  // namespace

Completion HttpChatClient::complete(const Prompt& prompt) {
  const std::string body =
      chat_request_body(prompt, config_.model, config_.temperature, config_.max_tokens).dump();
  auto backoff = config_.retry.initial_backoff;
  Completion last;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (!limiter_->acquire(config_.timeout)) {
      last = Completion{"", ClientError{ErrorKind::kRateLimit, "rate limiter wait exceeds request timeout", 0}};
    } else {
      last = attempt_once(body);
      last.attempts = attempt + 1;
      if (last.ok() || !retryable(*last.error)) return last;
    }
    last.attempts = attempt + 1;
    if (attempt == config_.retry.max_retries) break;
    spdlog::debug("request failed ({}), retrying in {} ms", last.error->message, backoff.count());
    config_.retry.sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<std::int64_t>(static_cast<double>(backoff.count()) * config_.retry.multiplier));
  }
  return last;
}

}  // namespace kgforge::llm

namespace kgforge::demo {

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config, std::shared_ptr<llm::RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  if (!limiter_) limiter_ = std::make_shared<llm::RateLimiter>(60.0);
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

std::vector<double> HttpEmbeddingProvider::embed(std::string_view text) {
  const llm::Endpoint ep = llm::split_endpoint(config_.endpoint);
  if (!limiter_->acquire(config_.timeout)) throw Error("embedding rate limit wait exceeds timeout");
  httplib::Client cli(ep.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  cli.set_connection_timeout(secs.count(), 0);
  cli.set_read_timeout(secs.count(), 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};
  auto res = cli.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw Error("embedding request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("embedding request returned HTTP " + std::to_string(res->status));
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  try {
    return j.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed embedding response: ") + e.what());
  }
}

}  // namespace kgforge::demo
