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

#include "lexentail/rate_limit.h"

#include <algorithm>
#include <cmath>
#include <thread>

namespace lexentail {

SteadyClock SystemSteadyClock() {
  return [] { return std::chrono::steady_clock::now(); };
}

Sleeper SystemSleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds RetryPolicy::DelayAfter(int failed_attempts) const {
  double ms = static_cast<double>(initial_delay.count()) *
              std::pow(multiplier, std::max(0, failed_attempts - 1));
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

TokenBucket::TokenBucket(double requests_per_minute, SteadyClock clock,
                         Sleeper sleep)
    : rate_per_minute_(std::max(0.0, requests_per_minute)),
      capacity_(std::max(1.0, rate_per_minute_ / 60.0)),
      tokens_(capacity_),
      clock_(std::move(clock)),
      sleep_(std::move(sleep)),
      last_(clock_()) {}

void TokenBucket::Acquire() {
  if (rate_per_minute_ <= 0) return;
  const double per_ms = rate_per_minute_ / 60000.0;
  for (;;) {
    std::chrono::milliseconds wait;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto now = clock_();
      double elapsed_ms =
          std::chrono::duration<double, std::milli>(now - last_).count();
      last_ = now;
      tokens_ = std::min(capacity_, tokens_ + elapsed_ms * per_ms);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::milliseconds(
          static_cast<long long>(std::ceil((1.0 - tokens_) / per_ms)));
    }
    sleep_(wait);
  }
}

}  // namespace lexentail
