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

#include "lexentail/verdict.h"

#include <cctype>
#include <regex>
#include <string>

namespace lexentail {
namespace {

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsAsciiPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

ExtractionResult Clear(Verdict v, std::size_t offset, std::size_t length,
                       VerdictRule rule) {
  ExtractionResult r;
  r.verdict = v;
  r.status = ExtractionStatus::kClear;
  r.matched_span = TextSpan{offset, length};
  r.rule = rule;
  return r;
}

ExtractionResult Ambiguous(VerdictRule rule) {
  ExtractionResult r;
  r.status = ExtractionStatus::kAmbiguous;
  r.rule = rule;
  return r;
}

std::optional<ExtractionResult> LeadingToken(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() &&
         (std::isspace(static_cast<unsigned char>(text[i])) ||
          IsAsciiPunct(text[i]))) {
    ++i;
  }
  std::size_t j = i;
  while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) {
    ++j;
  }
  std::string_view word(text.data() + i, j - i);
  if (word == "true") return Clear(Verdict::kTrue, i, j - i, VerdictRule::kLeadingToken);
  if (word == "false") return Clear(Verdict::kFalse, i, j - i, VerdictRule::kLeadingToken);
  return std::nullopt;
}

// Collects every match of `re` whose group 1 names a verdict; returns the
// first match when all agree.
std::optional<ExtractionResult> Agreeing(
    const std::string& text, const std::regex& re, VerdictRule rule,
    bool (*accept)(const std::string&, const std::smatch&) = nullptr) {
  std::optional<ExtractionResult> first;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    if (accept != nullptr && !accept(text, m)) continue;
    std::string word = m.str(1);
    Verdict v = (word == "true" || word == "yes") ? Verdict::kTrue : Verdict::kFalse;
    if (!first) {
      first = Clear(v, static_cast<std::size_t>(m.position(1)),
                    static_cast<std::size_t>(m.length(1)), rule);
    } else if (*first->verdict != v) {
      return Ambiguous(rule);
    }
  }
  return first;
}

// A yes/no word counts only when nothing but spaces separates it from
// punctuation, a line break or the end of the text.
bool StandsAlone(const std::string& text, const std::smatch& m) {
  std::size_t i = static_cast<std::size_t>(m.position(1) + m.length(1));
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (i == text.size() || text[i] == '\n' || text[i] == '\r') return true;
  char c = text[i];
  return IsAsciiPunct(c) && c != '-' && c != '\'' && c != '/';
}

}  // namespace

GoldLabel VerdictToLabel(Verdict v) {
  return v == Verdict::kTrue ? GoldLabel::kYes : GoldLabel::kNo;
}

Verdict LabelToVerdict(GoldLabel label) {
  return label == GoldLabel::kYes ? Verdict::kTrue : Verdict::kFalse;
}

std::string_view VerdictName(Verdict v) {
  return v == Verdict::kTrue ? "TRUE" : "FALSE";
}

std::string_view StatusName(ExtractionStatus status) {
  switch (status) {
    case ExtractionStatus::kClear: return "CLEAR";
    case ExtractionStatus::kAmbiguous: return "AMBIGUOUS";
    case ExtractionStatus::kAbsent: return "ABSENT";
  }
  return "UNKNOWN";
}

ExtractionResult ExtractVerdict(std::string_view completion) {
  static const std::regex kPhrase(
      R"(\bhypothesis\s+(?:\(\s*true\s+or\s+false\s*\)\s+)?is\s+(true|false)\b)");
  static const std::regex kYesNo(R"(\b(yes|no)\b)");
  static const std::regex kTruth(R"(\b(true|false)\b)");

  const std::string text = AsciiLower(completion);

  if (auto r = LeadingToken(text)) return *r;
  if (auto r = Agreeing(text, kPhrase, VerdictRule::kHypothesisPhrase)) return *r;
  if (auto r = Agreeing(text, kYesNo, VerdictRule::kYesNoToken, &StandsAlone)) {
    return *r;
  }

  std::optional<ExtractionResult> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kTruth);
       it != std::sregex_iterator(); ++it) {
    Verdict v = it->str(1) == "true" ? Verdict::kTrue : Verdict::kFalse;
    last = Clear(v, static_cast<std::size_t>(it->position(1)),
                 static_cast<std::size_t>(it->length(1)),
                 VerdictRule::kLastTruthToken);
  }
  if (last) return *last;
  return ExtractionResult{};
}

}  // namespace lexentail
