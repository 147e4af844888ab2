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

#ifndef LEXENTAIL_CLI_H_
#define LEXENTAIL_CLI_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lexentail/eval.h"
#include "lexentail/llm.h"
#include "lexentail/prompt.h"

namespace lexentail {

// A parsed --backend value: "mock:<rules.json>", "remote:<base url>" or
// "cache" (replay only).
struct BackendDescriptor {
  enum class Kind { kMock, kRemote, kCacheOnly };
  Kind kind = Kind::kCacheOnly;
  std::string target;

  static BackendDescriptor Parse(const std::string& text);
  std::string ToString() const;
};

struct HarnessConfig {
  BackendDescriptor backend;
  std::string model = "text-davinci-002";
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> exemplars;
  LayoutSpec layout;
  int workers = 1;
  ScoringPolicy policy = ScoringPolicy::kUnscoredIncorrect;
  double requests_per_minute = 0;
  bool deterministic = false;

  // Throws Error when a field is out of range.
  void Validate() const;
  std::shared_ptr<CompletionBackend> MakeBackend() const;
  std::unique_ptr<CompletionClient> MakeClient() const;
};

// Turns "\n", "\t" and "\\" escapes into the characters they name.
std::string DecodeEscapes(const std::string& text);

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Data goes to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexentail

#endif  // LEXENTAIL_CLI_H_
