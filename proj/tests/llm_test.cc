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

#include <thread>

#include <gtest/gtest.h>

#include "lexentail/digest.h"
#include "test_util.h"

namespace lexentail {
namespace {

using namespace std::chrono_literals;
using testing::TempDir;

CompletionRequest Req(std::string input, std::string tag = "single") {
  CompletionRequest r;
  r.model = "text-davinci-002";
  r.input = std::move(input);
  r.stage_tag = std::move(tag);
  return r;
}

// Throws the scripted errors in order, then answers "True".
class FlakyBackend : public CompletionBackend {
 public:
  explicit FlakyBackend(std::vector<BackendErrorKind> failures)
      : failures_(std::move(failures)) {}
  std::string Complete(const CompletionRequest&) override {
    std::size_t n = calls_++;
    if (n < failures_.size()) throw BackendError(failures_[n], "scripted failure");
    return "True";
  }
  std::string id() const override { return "flaky"; }
  std::size_t calls() const { return calls_; }

 private:
  std::vector<BackendErrorKind> failures_;
  std::size_t calls_ = 0;
};

TEST(DigestTest, MatchesReferenceImplementation) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  for (std::size_t len : {55u, 56u, 63u, 64u, 65u, 1000u}) {
    std::string s(len, 'x');
    EXPECT_EQ(Sha256Hex(s), testing::ReferenceSha256(s)) << len;
  }
}

TEST(CacheKeyTest, HashesCanonicalRequest) {
  CompletionRequest r = Req("Premise: P\nHypothesis: H");
  const std::string canonical =
      "{\"input\":\"Premise: P\\nHypothesis: H\",\"model\":\"text-davinci-002\","
      "\"params\":{\"frequency_penalty\":0.0,\"max_tokens\":256,\"presence_penalty\":0.0,"
      "\"temperature\":0.0,\"top_p\":1.0},\"stage_tag\":\"single\"}";
  EXPECT_EQ(CacheKey(r), testing::ReferenceSha256(canonical));
}

TEST(CacheKeyTest, EveryFieldParticipates) {
  CompletionRequest base = Req("x");
  std::string k = CacheKey(base);
  EXPECT_EQ(CacheKey(base), k);
  CompletionRequest r = base;
  r.model = "other";
  EXPECT_NE(CacheKey(r), k);
  r = base;
  r.stage_tag = "cot_stage1";
  EXPECT_NE(CacheKey(r), k);
  r = base;
  r.params.max_tokens = 512;
  EXPECT_NE(CacheKey(r), k);
  r = base;
  r.params.top_p = 0.5;
  EXPECT_NE(CacheKey(r), k);
  EXPECT_EQ(RequestFromJson(RequestToJson(base)), base);
}

TEST(GenerationParamsTest, Validation) {
  GenerationParams p;
  EXPECT_NO_THROW(p.Validate());
  p.top_p = 1.5;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.max_tokens = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.temperature = -1;
  EXPECT_THROW(p.Validate(), Error);
}

TEST(MockBackendTest, FirstMatchingRuleWins) {
  auto mock = MockBackend::FromJson(
      R"([{"pattern":"alpha","completion":"True."},{"pattern":"*","completion":"False"}])");
  EXPECT_EQ(mock->Complete(Req("has alpha inside")), "True.");
  EXPECT_EQ(mock->Complete(Req("other")), "False");
  EXPECT_EQ(mock->calls(), 2u);
  mock->ResetCalls();
  EXPECT_EQ(mock->calls(), 0u);
}

TEST(MockBackendTest, UnmatchedAndMalformedScripts) {
  auto mock = MockBackend::FromJson(R"([{"pattern":"alpha","completion":"True"}])");
  try {
    mock->Complete(Req("beta"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kInvalidRequest);
    EXPECT_FALSE(e.retryable());
  }
  EXPECT_THROW(MockBackend::FromJson("{}"), Error);
  EXPECT_THROW(MockBackend::FromJson("[{\"pattern\":1}]"), Error);
  EXPECT_THROW(MockBackend::FromJson("[oops"), Error);
}

TEST(CompletionClientTest, CachesAndReplays) {
  TempDir dir;
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{{"*", "True"}});
  {
    CompletionClient client(mock, ResponseCache(dir.path()));
    CompletionRecord first = client.Complete(Req("q"));
    EXPECT_FALSE(first.from_cache);
    EXPECT_EQ(first.backend_id, "mock");
    CompletionRecord second = client.Complete(Req("q"));
    EXPECT_TRUE(second.from_cache);
    EXPECT_EQ(second.completion, "True");
    EXPECT_EQ(client.backend_calls(), 1u);
  }
  CompletionClient replay(nullptr, ResponseCache(dir.path()));
  EXPECT_EQ(replay.Complete(Req("q")).completion, "True");
  EXPECT_EQ(replay.backend_calls(), 0u);
  try {
    replay.Complete(Req("unseen"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kUnavailable);
    EXPECT_NE(std::string(e.what()).find("completion backend required"), std::string::npos);
  }
}

TEST(CompletionClientTest, CacheRecordIsSelfDescribing) {
  TempDir dir;
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{{"*", "False"}});
  CompletionClient client(mock, ResponseCache(dir.path()));
  CompletionRequest r = Req("q", "cot_stage1");
  client.Complete(r);
  auto doc = ResponseCache(dir.path()).Load(CacheKey(r));
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(RequestFromJson(doc->at("request")), r);
  EXPECT_EQ(doc->at("completion"), "False");
  EXPECT_EQ(doc->at("backend_id"), "mock");
  EXPECT_FALSE(doc->at("timestamp").get<std::string>().empty());
}

TEST(CompletionClientTest, DeterministicModeOmitsTimestamps) {
  TempDir dir;
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{{"*", "False"}});
  ClientOptions opts;
  opts.deterministic = true;
  CompletionClient client(mock, ResponseCache(dir.path()), opts);
  CompletionRequest r = Req("q");
  EXPECT_TRUE(client.Complete(r).timestamp.empty());
  EXPECT_EQ(ResponseCache(dir.path()).Load(CacheKey(r))->value("timestamp", "?"), "");
}

TEST(CompletionClientTest, RetriesRetryableErrorsWithBackoff) {
  auto flaky = std::make_shared<FlakyBackend>(
      std::vector{BackendErrorKind::kThrottled, BackendErrorKind::kTransient});
  std::vector<std::chrono::milliseconds> sleeps;
  ClientOptions opts;
  opts.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  CompletionClient client(flaky, std::nullopt, opts);
  EXPECT_EQ(client.Complete(Req("q")).completion, "True");
  EXPECT_EQ(flaky->calls(), 3u);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{1000ms, 2000ms}));
}

TEST(CompletionClientTest, GivesUpAfterMaxAttempts) {
  auto flaky = std::make_shared<FlakyBackend>(
      std::vector<BackendErrorKind>(10, BackendErrorKind::kTransient));
  ClientOptions opts;
  opts.retry.max_attempts = 3;
  opts.sleep = [](std::chrono::milliseconds) {};
  CompletionClient client(flaky, std::nullopt, opts);
  try {
    client.Complete(Req("q"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kRetriesExhausted);
  }
  EXPECT_EQ(flaky->calls(), 3u);
}

TEST(CompletionClientTest, AuthenticationErrorsAreNotRetried) {
  auto flaky =
      std::make_shared<FlakyBackend>(std::vector{BackendErrorKind::kAuthentication});
  ClientOptions opts;
  opts.sleep = [](std::chrono::milliseconds) { FAIL() << "should not sleep"; };
  CompletionClient client(flaky, std::nullopt, opts);
  try {
    client.Complete(Req("q"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kAuthentication);
  }
  EXPECT_EQ(flaky->calls(), 1u);
}

TEST(CompletionClientTest, RejectsOversizedInputAndEmptyInput) {
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{{"*", "True"}});
  ClientOptions opts;
  opts.context_window_tokens = 300;
  CompletionClient client(mock, std::nullopt, opts);
  EXPECT_NO_THROW(client.Complete(Req(std::string(100, 'a'))));
  EXPECT_THROW(client.Complete(Req(std::string(400, 'a'))), BackendError);
  EXPECT_THROW(client.Complete(Req("")), BackendError);
  EXPECT_EQ(mock->calls(), 1u);
}

TEST(RetryPolicyTest, ExponentialWithCap) {
  RetryPolicy p;
  EXPECT_EQ(p.DelayAfter(1), 1000ms);
  EXPECT_EQ(p.DelayAfter(3), 4000ms);
  EXPECT_EQ(p.DelayAfter(6), 32000ms);
  EXPECT_EQ(p.DelayAfter(20), 32000ms);
}

TEST(TokenBucketTest, SpacesRequestsAtTheConfiguredRate) {
  auto now = std::chrono::steady_clock::time_point{};
  std::chrono::milliseconds slept{0};
  TokenBucket bucket(
      60, [&] { return now; },
      [&](std::chrono::milliseconds d) {
        slept += d;
        now += d;
      });
  bucket.Acquire();  // initial token
  EXPECT_EQ(slept, 0ms);
  for (int i = 0; i < 5; ++i) bucket.Acquire();
  EXPECT_EQ(slept, 5000ms);
}

TEST(TokenBucketTest, ZeroRateNeverBlocks) {
  TokenBucket bucket(0, SystemSteadyClock(),
                     [](std::chrono::milliseconds) { FAIL() << "slept"; });
  for (int i = 0; i < 100; ++i) bucket.Acquire();
}

TEST(ResponseCacheTest, StoreLoadStatsAndPrune) {
  TempDir dir;
  ResponseCache cache(dir.path());
  const std::string key(64, 'a');
  EXPECT_FALSE(cache.Load(key).has_value());
  cache.Store(key, {{"completion", "True"}});
  EXPECT_EQ(cache.PathFor(key), dir.path() / "aa" / (key + ".json"));
  EXPECT_EQ(cache.Load(key)->at("completion"), "True");

  testing::WriteText(dir / "bb" / (std::string(64, 'b') + ".json"), "{not json");
  testing::WriteText(dir / "cc" / ".tmp-1-2", "partial");
  auto stats = cache.Collect();
  EXPECT_EQ(stats.records, 1u);
  EXPECT_EQ(stats.corrupt, 1u);
  EXPECT_EQ(stats.temp_files, 1u);
  EXPECT_GT(stats.bytes, 0u);

  EXPECT_EQ(cache.Prune(std::nullopt), 2u);
  stats = cache.Collect();
  EXPECT_EQ(stats.records, 1u);
  EXPECT_EQ(stats.corrupt + stats.temp_files, 0u);
  EXPECT_EQ(cache.Prune(std::chrono::hours(0)), 1u);
  EXPECT_EQ(cache.Collect().records, 0u);
}

TEST(ResponseCacheTest, ConcurrentWritersLeaveOneValidRecord) {
  TempDir dir;
  ResponseCache cache(dir.path());
  const std::string key(64, 'd');
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) cache.Store(key, {{"writer", t}, {"i", i}});
    });
  }
  for (auto& th : threads) th.join();
  ASSERT_TRUE(cache.Load(key).has_value());
  auto stats = cache.Collect();
  EXPECT_EQ(stats.records, 1u);
  EXPECT_EQ(stats.temp_files, 0u);
}

}  // namespace
}  // namespace lexentail
