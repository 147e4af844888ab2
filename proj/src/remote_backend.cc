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

#include "lexentail/remote_backend.h"

#include <cstdlib>

#include "httplib.h"

namespace lexentail {
namespace {

nlohmann::json ParseBody(std::string_view body) {
  auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw BackendError(BackendErrorKind::kMalformedResponse,
                       "backend response is not a JSON object");
  }
  return doc;
}

}  // namespace

Endpoint Endpoint::Parse(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error("backend URL '" + std::string(url) + "' has no scheme");
  }
  std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error("unsupported URL scheme '" + std::string(scheme) + "'");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  if (path_start == std::string_view::npos) {
    e.origin = std::string(url);
  } else {
    e.origin = std::string(url.substr(0, path_start));
    e.path_prefix = std::string(url.substr(path_start));
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') {
      e.path_prefix.pop_back();
    }
  }
  if (e.origin.size() == scheme_end + 3) {
    throw Error("backend URL '" + std::string(url) + "' has no host");
  }
  return e;
}

std::string ApiKeyFromEnvironment() {
  const char* key = std::getenv(kApiKeyVariable);
  return key != nullptr ? key : "";
}

BackendErrorKind ClassifyHttpStatus(int status) {
  if (status == 401 || status == 403) return BackendErrorKind::kAuthentication;
  if (status == 429) return BackendErrorKind::kThrottled;
  if (status == 408 || status >= 500) return BackendErrorKind::kTransient;
  return BackendErrorKind::kInvalidRequest;
}

nlohmann::json BuildCompletionPayload(const CompletionRequest& request) {
  return {
      {"model", request.model},
      {"prompt", request.input},
      {"temperature", request.params.temperature},
      {"top_p", request.params.top_p},
      {"frequency_penalty", request.params.frequency_penalty},
      {"presence_penalty", request.params.presence_penalty},
      {"max_tokens", request.params.max_tokens},
  };
}

std::string ParseCompletionResponse(std::string_view body) {
  nlohmann::json doc = ParseBody(body);
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty() ||
      !(*choices)[0].is_object() || !(*choices)[0].contains("text") ||
      !(*choices)[0]["text"].is_string()) {
    throw BackendError(BackendErrorKind::kMalformedResponse,
                       "backend response has no choices[0].text");
  }
  return (*choices)[0]["text"].get<std::string>();
}

nlohmann::json BuildEmbeddingPayload(std::string_view model, std::string_view input) {
  return {{"model", model}, {"input", input}};
}

std::vector<double> ParseEmbeddingResponse(std::string_view body) {
  nlohmann::json doc = ParseBody(body);
  auto data = doc.find("data");
  if (data == doc.end() || !data->is_array() || data->empty() ||
      !(*data)[0].is_object() || !(*data)[0].contains("embedding") ||
      !(*data)[0]["embedding"].is_array()) {
    throw BackendError(BackendErrorKind::kMalformedResponse,
                       "backend response has no data[0].embedding");
  }
  std::vector<double> out;
  for (const auto& v : (*data)[0]["embedding"]) {
    if (!v.is_number()) {
      throw BackendError(BackendErrorKind::kMalformedResponse,
                         "embedding holds a non-numeric component");
    }
    out.push_back(v.get<double>());
  }
  if (out.empty()) {
    throw BackendError(BackendErrorKind::kMalformedResponse, "empty embedding");
  }
  return out;
}

std::string PostJson(const Endpoint& endpoint, std::string_view path,
                     const nlohmann::json& payload, const std::string& api_key,
                     std::chrono::seconds timeout) {
  if (api_key.empty()) {
    throw BackendError(BackendErrorKind::kAuthentication,
                       std::string("no API key: set ") + kApiKeyVariable);
  }
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_bearer_token_auth(api_key);

  std::string full_path = endpoint.path_prefix + std::string(path);
  auto res = client.Post(full_path, payload.dump(), "application/json");
  if (!res) {
    throw BackendError(BackendErrorKind::kTransient,
                       "request to " + endpoint.origin + full_path +
                           " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(ClassifyHttpStatus(res->status),
                       "backend returned HTTP " + std::to_string(res->status) +
                           " for " + full_path);
  }
  return res->body;
}

RemoteCompletionBackend::RemoteCompletionBackend(std::string base_url,
                                                 std::string api_key,
                                                 std::chrono::seconds timeout)
    : base_url_(std::move(base_url)),
      endpoint_(Endpoint::Parse(base_url_)),
      api_key_(std::move(api_key)),
      timeout_(timeout) {}

std::string RemoteCompletionBackend::Complete(const CompletionRequest& request) {
  std::string body = PostJson(endpoint_, "/completions",
                              BuildCompletionPayload(request), api_key_, timeout_);
  return ParseCompletionResponse(body);
}

}  // namespace lexentail
