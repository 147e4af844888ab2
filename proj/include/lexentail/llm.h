// Copyright 2026 The lex-entail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEXENTAIL_LLM_H_
#define LEXENTAIL_LLM_H_

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lexentail/error.h"
#include "lexentail/rate_limit.h"
#include "lexentail/response_cache.h"

namespace lexentail {

// Token budgets for the two kinds of completion the harness asks for.
inline constexpr int kAnswerMaxTokens = 256;
inline constexpr int kReasoningMaxTokens = 512;

// Defaults give deterministic greedy decoding.
struct GenerationParams {
  double temperature = 0.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_tokens = kAnswerMaxTokens;

  bool operator==(const GenerationParams&) const = default;
  // Throws Error on out-of-range values.
  void Validate() const;
};

struct CompletionRequest {
  std::string model;
  std::string input;
  GenerationParams params;
  std::string stage_tag;

  bool operator==(const CompletionRequest&) const = default;
};

struct CompletionRecord {
  CompletionRequest request;
  std::string completion;
  bool from_cache = false;
  std::string backend_id;
  // ISO-8601 UTC, empty in deterministic mode.
  std::string timestamp;
};

nlohmann::json RequestToJson(const CompletionRequest& request);
CompletionRequest RequestFromJson(const nlohmann::json& doc);

// SHA-256 hex over the canonical JSON of (model, input, params, stage_tag).
// Object keys are sorted, so the digest is independent of field order.
std::string CacheKey(const CompletionRequest& request);

enum class BackendErrorKind {
  kAuthentication,     // bad or missing credentials
  kThrottled,          // backend asked us to slow down
  kTransient,          // network failure or server error
  kMalformedResponse,  // response could not be decoded
  kInvalidRequest,     // backend rejected the request itself
  kUnavailable,        // no backend configured and the cache missed
  kRetriesExhausted,
};

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  BackendErrorKind kind() const { return kind_; }
  bool retryable() const {
    return kind_ == BackendErrorKind::kThrottled ||
           kind_ == BackendErrorKind::kTransient;
  }

 private:
  BackendErrorKind kind_;
};

// A source of completions. Implementations must be safe to call from
// several threads at once.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string Complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

struct MockRule {
  // Literal substring of the input; "*" matches everything.
  std::string pattern;
  std::string completion;
};

// Scripted backend for offline runs: the first rule whose pattern occurs in
// the input wins. Unmatched inputs raise kInvalidRequest.
class MockBackend : public CompletionBackend {
 public:
  explicit MockBackend(std::vector<MockRule> rules, std::string id = "mock");

  // JSON array of {"pattern": ..., "completion": ...}.
  static std::unique_ptr<MockBackend> FromJson(std::string_view source);
  static std::unique_ptr<MockBackend> FromFile(const std::filesystem::path& path);

  std::string Complete(const CompletionRequest& request) override;
  std::string id() const override { return id_; }

  std::size_t calls() const { return calls_.load(); }
  void ResetCalls() { calls_ = 0; }

 private:
  std::vector<MockRule> rules_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

struct ClientOptions {
  RetryPolicy retry;
  // 0 disables rate limiting.
  double requests_per_minute = 0;
  // Prompt plus max_tokens may not exceed this many estimated tokens
  // (4 bytes per token); 0 disables the check. Inputs are never truncated.
  std::size_t context_window_tokens = 0;
  bool deterministic = false;
  Sleeper sleep = SystemSleeper();
  SteadyClock clock = SystemSteadyClock();
};

// Cache-first, retrying front end over one backend. Without a backend the
// client replays the cache and fails on a miss.
class CompletionClient {
 public:
  CompletionClient(std::shared_ptr<CompletionBackend> backend,
                   std::optional<ResponseCache> cache, ClientOptions options = {});

  CompletionRecord Complete(const CompletionRequest& request);

  bool has_backend() const { return backend_ != nullptr; }
  const std::optional<ResponseCache>& cache() const { return cache_; }
  // Backend invocations made by this client, including failed attempts.
  std::size_t backend_calls() const { return backend_calls_.load(); }

 private:
  std::shared_ptr<CompletionBackend> backend_;
  std::optional<ResponseCache> cache_;
  ClientOptions options_;
  TokenBucket bucket_;
  std::atomic<std::size_t> backend_calls_{0};
};

// Current UTC time as 2026-10-14T11:32:00Z.
std::string UtcTimestamp();

}  // namespace lexentail

#endif  // LEXENTAIL_LLM_H_
