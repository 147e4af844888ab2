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

#ifndef LEXENTAIL_REMOTE_BACKEND_H_
#define LEXENTAIL_REMOTE_BACKEND_H_

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lexentail/llm.h"

namespace lexentail {

inline constexpr const char* kApiKeyVariable = "LEX_ENTAIL_API_KEY";

// Splits "https://host:port/v1" into the origin and a path prefix ("/v1").
struct Endpoint {
  std::string origin;
  std::string path_prefix;

  static Endpoint Parse(std::string_view url);
};

// Value of LEX_ENTAIL_API_KEY, or empty.
std::string ApiKeyFromEnvironment();

// Maps an HTTP status to the error class used for retry decisions.
BackendErrorKind ClassifyHttpStatus(int status);

// Body of POST <prefix>/completions.
nlohmann::json BuildCompletionPayload(const CompletionRequest& request);
// choices[0].text; throws kMalformedResponse.
std::string ParseCompletionResponse(std::string_view body);

nlohmann::json BuildEmbeddingPayload(std::string_view model, std::string_view input);
// data[0].embedding; throws kMalformedResponse.
std::vector<double> ParseEmbeddingResponse(std::string_view body);

// POSTs JSON with bearer auth and returns the response body. Non-2xx
// statuses and transport failures become BackendError.
std::string PostJson(const Endpoint& endpoint, std::string_view path,
                     const nlohmann::json& payload, const std::string& api_key,
                     std::chrono::seconds timeout);

// OpenAI-compatible completions endpoint.
class RemoteCompletionBackend : public CompletionBackend {
 public:
  RemoteCompletionBackend(std::string base_url, std::string api_key,
                          std::chrono::seconds timeout = std::chrono::seconds(60));

  std::string Complete(const CompletionRequest& request) override;
  std::string id() const override { return "remote:" + base_url_; }

 private:
  std::string base_url_;
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

}  // namespace lexentail

#endif  // LEXENTAIL_REMOTE_BACKEND_H_
