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

#ifndef LEXENTAIL_RATE_LIMIT_H_
#define LEXENTAIL_RATE_LIMIT_H_

#include <chrono>
#include <functional>
#include <mutex>

namespace lexentail {

using SteadyClock = std::function<std::chrono::steady_clock::time_point()>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

SteadyClock SystemSteadyClock();
Sleeper SystemSleeper();

// Bounded exponential backoff between attempts of one request.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{1000};
  std::chrono::milliseconds max_delay{32000};
  double multiplier = 2.0;

  // Delay after the `failed_attempts`-th failure (1-based).
  std::chrono::milliseconds DelayAfter(int failed_attempts) const;
};

// Token bucket shared by all workers of a client. Capacity is one second of
// the configured rate (at least one request); a rate of zero disables it.
class TokenBucket {
 public:
  explicit TokenBucket(double requests_per_minute,
                       SteadyClock clock = SystemSteadyClock(),
                       Sleeper sleep = SystemSleeper());

  // Blocks until a request may be sent.
  void Acquire();

  double requests_per_minute() const { return rate_per_minute_; }

 private:
  double rate_per_minute_;
  double capacity_;
  double tokens_;
  SteadyClock clock_;
  Sleeper sleep_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

}  // namespace lexentail

#endif  // LEXENTAIL_RATE_LIMIT_H_
