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

#ifndef LEXENTAIL_FINETUNE_H_
#define LEXENTAIL_FINETUNE_H_

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lexentail/corpus.h"
#include "lexentail/error.h"
#include "lexentail/explain.h"
#include "lexentail/llm.h"
#include "lexentail/prompt.h"

namespace lexentail {

inline constexpr std::string_view kBecauseAccordingTo = "Because according to ";
inline constexpr std::string_view kCompletionStop = "\n###";

class FinetuneError : public Error {
 public:
  using Error::Error;
};

enum class CompletionKind { kLabel, kLabelPlusPseudo, kGeneratedExplanation };

// The four training-set layouts:
//   1  premise + hypothesis            -> label
//   2  prompt + premise + hypothesis   -> label
//   3  prompt + premise + hypothesis   -> label + pseudo-explanation
//   4  prompt + premise + hypothesis   -> generated explanation
struct FinetuneConfig {
  int id = 2;
  bool uses_prompt = true;
  CompletionKind completion_kind = CompletionKind::kLabel;

  // Throws FinetuneError outside 1..4.
  static FinetuneConfig FromId(int id);
};

struct FinetuneRecord {
  std::string input_text;
  std::string completion_text;
  std::string case_id;
  int config_id = 0;

  bool operator==(const FinetuneRecord&) const = default;
};

struct FinetuneBackends {
  // Required by config 3.
  const EmbeddingBackend* embedding = nullptr;
  // Required by config 4; may be a cache-only client.
  CompletionClient* completion = nullptr;
  std::string model;
  int workers = 1;
  LayoutSpec layout;
};

// One record per case, corpus order. Config 4 asks the completion backend to
// explain each gold label once; explanations are not filtered.
std::vector<FinetuneRecord> BuildRecords(const Corpus& corpus,
                                         const FinetuneConfig& config,
                                         const FinetuneBackends& backends);

// One {"prompt", "completion"} object per line. Completions are written with
// a leading space and the "\n###" stop sequence. Returns bytes written.
std::size_t SerializeJsonl(const std::vector<FinetuneRecord>& records,
                           std::ostream& sink);

struct FinetuneExample {
  std::string prompt;
  std::string completion;  // without the leading space and stop sequence
  bool operator==(const FinetuneExample&) const = default;
};

// Reads an export back, validating the completion conventions.
std::vector<FinetuneExample> ParseJsonl(std::string_view source);

FinetuneExample ToExample(const FinetuneRecord& record);

}  // namespace lexentail

#endif  // LEXENTAIL_FINETUNE_H_
