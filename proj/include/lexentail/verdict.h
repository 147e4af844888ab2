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

#ifndef LEXENTAIL_VERDICT_H_
#define LEXENTAIL_VERDICT_H_

#include <cstddef>
#include <optional>
#include <string_view>

#include "lexentail/corpus.h"

namespace lexentail {

enum class Verdict { kTrue, kFalse };

GoldLabel VerdictToLabel(Verdict v);
Verdict LabelToVerdict(GoldLabel label);
std::string_view VerdictName(Verdict v);  // "TRUE" / "FALSE"

enum class ExtractionStatus { kClear, kAmbiguous, kAbsent };
std::string_view StatusName(ExtractionStatus status);  // "CLEAR", ...

struct TextSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const TextSpan&) const = default;
};

// Which cascade rule decided the result.
enum class VerdictRule {
  kNone,
  kLeadingToken,
  kHypothesisPhrase,
  kYesNoToken,
  kLastTruthToken,
};

struct ExtractionResult {
  std::optional<Verdict> verdict;
  ExtractionStatus status = ExtractionStatus::kAbsent;
  // Covers the deciding true/false/yes/no word.
  std::optional<TextSpan> matched_span;
  VerdictRule rule = VerdictRule::kNone;
};

// Rule cascade, highest priority first, all case-insensitive:
//   1. the first word, after leading whitespace and punctuation, is
//      true/false;
//   2. "hypothesis is true|false" or "hypothesis (true or false) is
//      true|false";
//   3. a yes/no word followed by punctuation, a line break or end of text;
//   4. the last true/false word.
// Rules 2 and 3 report kAmbiguous when their matches disagree.
ExtractionResult ExtractVerdict(std::string_view completion);

}  // namespace lexentail

#endif  // LEXENTAIL_VERDICT_H_
