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
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "lexentail/explain.h"
#include "test_util.h"

namespace lexentail {
namespace {

using namespace std::chrono_literals;

// Local HTTP server that records the last request and answers with a
// status/body chosen by the test.
class FakeApi {
 public:
  FakeApi() {
    server_.Post(R"(/v1/(completions|embeddings))",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   std::lock_guard<std::mutex> lock(mu_);
                   last_path_ = req.path;
                   last_body_ = req.body;
                   last_auth_ = req.get_header_value("Authorization");
                   ++hits_;
                   res.status = status_;
                   res.set_content(body_, "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  void Respond(int status, std::string body) {
    std::lock_guard<std::mutex> lock(mu_);
    status_ = status;
    body_ = std::move(body);
  }
  nlohmann::json last_json() {
    std::lock_guard<std::mutex> lock(mu_);
    return nlohmann::json::parse(last_body_);
  }
  std::string last_path() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_path_;
  }
  std::string last_auth() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_auth_;
  }
  int hits() {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  int status_ = 200;
  std::string body_ = "{}";
  std::string last_path_, last_body_, last_auth_;
  int hits_ = 0;
};

CompletionRequest Req() {
  CompletionRequest r;
  r.model = "text-davinci-002";
  r.input = "Premise: P\nHypothesis: H\nTrue or False?";
  r.stage_tag = "single";
  return r;
}

TEST(RemoteBackendTest, SendsDeterministicPayloadAndParsesText) {
  FakeApi api;
  api.Respond(200, R"({"choices":[{"text":" False."}]})");
  RemoteCompletionBackend backend(api.url(), "sk-test");
  EXPECT_EQ(backend.Complete(Req()), " False.");
  EXPECT_EQ(api.last_path(), "/v1/completions");
  EXPECT_EQ(api.last_auth(), "Bearer sk-test");
  nlohmann::json body = api.last_json();
  EXPECT_EQ(body["model"], "text-davinci-002");
  EXPECT_EQ(body["prompt"], Req().input);
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["top_p"], 1.0);
  EXPECT_EQ(body["frequency_penalty"], 0.0);
  EXPECT_EQ(body["presence_penalty"], 0.0);
  EXPECT_EQ(body["max_tokens"], 256);
}

TEST(RemoteBackendTest, ClassifiesHttpFailures) {
  FakeApi api;
  RemoteCompletionBackend backend(api.url(), "sk-test");
  auto kind_of = [&](int status, std::string body) {
    api.Respond(status, std::move(body));
    try {
      backend.Complete(Req());
    } catch (const BackendError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "status " << status << " did not throw";
    return BackendErrorKind::kUnavailable;
  };
  EXPECT_EQ(kind_of(401, "{}"), BackendErrorKind::kAuthentication);
  EXPECT_EQ(kind_of(429, "{}"), BackendErrorKind::kThrottled);
  EXPECT_EQ(kind_of(503, "{}"), BackendErrorKind::kTransient);
  EXPECT_EQ(kind_of(400, "{}"), BackendErrorKind::kInvalidRequest);
  EXPECT_EQ(kind_of(200, "not json"), BackendErrorKind::kMalformedResponse);
  EXPECT_EQ(kind_of(200, R"({"choices":[]})"), BackendErrorKind::kMalformedResponse);
}

TEST(RemoteBackendTest, ClientRetriesThrottledThenFailsAuthImmediately) {
  FakeApi api;
  api.Respond(429, "{}");
  std::vector<std::chrono::milliseconds> sleeps;
  ClientOptions opts;
  opts.retry.max_attempts = 3;
  opts.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  CompletionClient client(std::make_shared<RemoteCompletionBackend>(api.url(), "k"),
                          std::nullopt, opts);
  EXPECT_THROW(client.Complete(Req()), BackendError);
  EXPECT_EQ(api.hits(), 3);
  EXPECT_EQ(sleeps.size(), 2u);

  api.Respond(401, "{}");
  try {
    client.Complete(Req());
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kAuthentication);
  }
  EXPECT_EQ(api.hits(), 4);
}

TEST(RemoteBackendTest, MissingKeyFailsBeforeNetwork) {
  FakeApi api;
  RemoteCompletionBackend backend(api.url(), "");
  try {
    backend.Complete(Req());
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kAuthentication);
    EXPECT_NE(std::string(e.what()).find(kApiKeyVariable), std::string::npos) << e.what();
  }
  EXPECT_EQ(api.hits(), 0);
}

TEST(RemoteBackendTest, UnreachableHostIsTransient) {
  RemoteCompletionBackend backend("http://127.0.0.1:1/v1", "k", 2s);
  try {
    backend.Complete(Req());
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kTransient);
  }
}

TEST(RemoteBackendTest, ApiKeyComesFromEnvironment) {
  ::setenv(kApiKeyVariable, "sk-env", 1);
  EXPECT_EQ(ApiKeyFromEnvironment(), "sk-env");
  ::unsetenv(kApiKeyVariable);
  EXPECT_EQ(ApiKeyFromEnvironment(), "");
}

TEST(RemoteBackendTest, EndpointParsing) {
  Endpoint e = Endpoint::Parse("https://api.example.com/v1/");
  EXPECT_EQ(e.origin, "https://api.example.com");
  EXPECT_EQ(e.path_prefix, "/v1");
  Endpoint bare = Endpoint::Parse("http://localhost:8080");
  EXPECT_EQ(bare.origin, "http://localhost:8080");
  EXPECT_EQ(bare.path_prefix, "");
  EXPECT_THROW(Endpoint::Parse("ftp://x"), Error);
}

TEST(RemoteBackendTest, StatusClassification) {
  EXPECT_EQ(ClassifyHttpStatus(403), BackendErrorKind::kAuthentication);
  EXPECT_EQ(ClassifyHttpStatus(408), BackendErrorKind::kTransient);
  EXPECT_EQ(ClassifyHttpStatus(500), BackendErrorKind::kTransient);
  EXPECT_EQ(ClassifyHttpStatus(404), BackendErrorKind::kInvalidRequest);
}

TEST(RemoteEmbeddingTest, FetchesAndCachesVectors) {
  FakeApi api;
  api.Respond(200, R"({"data":[{"embedding":[0.6,0.8]}]})");
  testing::TempDir dir;
  RemoteEmbeddingBackend backend(api.url(), "text-embedding-ada-002", "k",
                                 ResponseCache(dir.path()));
  EmbeddingVector v = backend.Embed("hello");
  EXPECT_EQ(api.last_path(), "/v1/embeddings");
  EXPECT_EQ(api.last_json()["input"], "hello");
  ASSERT_EQ(v.dimension(), 2u);
  EXPECT_DOUBLE_EQ(v.components()[1], 0.8);
  backend.Embed("hello");
  EXPECT_EQ(api.hits(), 1);

  RemoteEmbeddingBackend offline("", "text-embedding-ada-002", "", ResponseCache(dir.path()));
  EXPECT_DOUBLE_EQ(offline.Embed("hello").components()[0], 0.6);
  EXPECT_THROW(offline.Embed("unseen"), BackendError);
}

}  // namespace
}  // namespace lexentail
