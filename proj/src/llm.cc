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

#include "lexentail/llm.h"

#include <cmath>
#include <ctime>

#include "lexentail/corpus.h"
#include "lexentail/digest.h"

namespace lexentail {

void GenerationParams::Validate() const {
  if (!(temperature >= 0) || !std::isfinite(temperature)) {
    throw Error("temperature must be a finite value >= 0");
  }
  if (!(top_p > 0 && top_p <= 1)) throw Error("top_p must lie in (0, 1]");
  if (!std::isfinite(frequency_penalty) || !std::isfinite(presence_penalty)) {
    throw Error("penalties must be finite");
  }
  if (max_tokens <= 0) throw Error("max_tokens must be positive");
}

nlohmann::json RequestToJson(const CompletionRequest& request) {
  return {
      {"model", request.model},
      {"input", request.input},
      {"params",
       {{"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"frequency_penalty", request.params.frequency_penalty},
        {"presence_penalty", request.params.presence_penalty},
        {"max_tokens", request.params.max_tokens}}},
      {"stage_tag", request.stage_tag},
  };
}

CompletionRequest RequestFromJson(const nlohmann::json& doc) {
  CompletionRequest r;
  r.model = doc.at("model").get<std::string>();
  r.input = doc.at("input").get<std::string>();
  const auto& p = doc.at("params");
  r.params.temperature = p.at("temperature").get<double>();
  r.params.top_p = p.at("top_p").get<double>();
  r.params.frequency_penalty = p.at("frequency_penalty").get<double>();
  r.params.presence_penalty = p.at("presence_penalty").get<double>();
  r.params.max_tokens = p.at("max_tokens").get<int>();
  r.stage_tag = doc.at("stage_tag").get<std::string>();
  return r;
}

std::string CacheKey(const CompletionRequest& request) {
  return Sha256Hex(RequestToJson(request).dump());
}

MockBackend::MockBackend(std::vector<MockRule> rules, std::string id)
    : rules_(std::move(rules)), id_(std::move(id)) {}

std::unique_ptr<MockBackend> MockBackend::FromJson(std::string_view source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("mock script: malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error("mock script must be a JSON array");
  std::vector<MockRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& r = doc[i];
    if (!r.is_object() || !r.contains("pattern") || !r.contains("completion") ||
        !r["pattern"].is_string() || !r["completion"].is_string()) {
      throw Error("mock rule " + std::to_string(i) +
                  " needs string fields \"pattern\" and \"completion\"");
    }
    rules.push_back({r["pattern"].get<std::string>(),
                     r["completion"].get<std::string>()});
  }
  return std::make_unique<MockBackend>(std::move(rules));
}

std::unique_ptr<MockBackend> MockBackend::FromFile(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

std::string MockBackend::Complete(const CompletionRequest& request) {
  ++calls_;
  for (const auto& rule : rules_) {
    if (rule.pattern == "*" ||
        request.input.find(rule.pattern) != std::string::npos) {
      return rule.completion;
    }
  }
  throw BackendError(BackendErrorKind::kInvalidRequest,
                     "no mock rule matches the request");
}

CompletionClient::CompletionClient(std::shared_ptr<CompletionBackend> backend,
                                   std::optional<ResponseCache> cache,
                                   ClientOptions options)
    : backend_(std::move(backend)),
      cache_(std::move(cache)),
      options_(std::move(options)),
      bucket_(options_.requests_per_minute, options_.clock, options_.sleep) {}

CompletionRecord CompletionClient::Complete(const CompletionRequest& request) {
  if (request.input.empty()) {
    throw BackendError(BackendErrorKind::kInvalidRequest, "empty completion input");
  }
  request.params.Validate();
  if (options_.context_window_tokens > 0) {
    std::size_t estimate = (request.input.size() + 3) / 4 +
                           static_cast<std::size_t>(request.params.max_tokens);
    if (estimate > options_.context_window_tokens) {
      throw BackendError(BackendErrorKind::kInvalidRequest,
                         "input exceeds the backend context window (~" +
                             std::to_string(estimate) + " > " +
                             std::to_string(options_.context_window_tokens) +
                             " tokens)");
    }
  }

  const std::string key = CacheKey(request);
  if (cache_) {
    if (auto doc = cache_->Load(key)) {
      try {
        if (RequestFromJson(doc->at("request")) == request) {
          CompletionRecord rec;
          rec.request = request;
          rec.completion = doc->at("completion").get<std::string>();
          rec.from_cache = true;
          rec.backend_id = doc->value("backend_id", "");
          rec.timestamp = doc->value("timestamp", "");
          return rec;
        }
      } catch (const nlohmann::json::exception&) {
        // Unreadable record: fall through and overwrite it.
      }
    }
  }
  if (!backend_) {
    throw BackendError(BackendErrorKind::kUnavailable,
                       "completion backend required (cache miss for " +
                           key.substr(0, 12) + ")");
  }

  std::string completion;
  for (int attempt = 1;; ++attempt) {
    bucket_.Acquire();
    ++backend_calls_;
    try {
      completion = backend_->Complete(request);
      break;
    } catch (const BackendError& e) {
      if (!e.retryable()) throw;
      if (attempt >= options_.retry.max_attempts) {
        throw BackendError(BackendErrorKind::kRetriesExhausted,
                           "giving up after " + std::to_string(attempt) +
                               " attempts: " + e.what());
      }
      options_.sleep(options_.retry.DelayAfter(attempt));
    }
  }

  CompletionRecord rec;
  rec.request = request;
  rec.completion = std::move(completion);
  rec.from_cache = false;
  rec.backend_id = backend_->id();
  rec.timestamp = options_.deterministic ? "" : UtcTimestamp();
  if (cache_) {
    cache_->Store(key, {{"key", key},
                        {"request", RequestToJson(request)},
                        {"completion", rec.completion},
                        {"backend_id", rec.backend_id},
                        {"timestamp", rec.timestamp}});
  }
  return rec;
}

std::string UtcTimestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lexentail
