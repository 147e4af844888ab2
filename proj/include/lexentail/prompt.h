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

#ifndef LEXENTAIL_PROMPT_H_
#define LEXENTAIL_PROMPT_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "lexentail/corpus.h"
#include "lexentail/error.h"

namespace lexentail {

inline constexpr std::string_view kTrueOrFalse = "True or False?";
inline constexpr std::string_view kCotTrigger = "Let's think step by step";
inline constexpr std::string_view kAnswerTrigger =
    "Therefore, the hypothesis (True or False) is";
inline constexpr std::string_view kLegalReasoningInstruction =
    "Please analyze if the hypothesis is True or False according to the given "
    "legal reasoning approach";
// The instruction used wherever a single fixed zero-shot prompt is needed
// (few-shot, chain-of-thought, fine-tuning inputs).
inline constexpr int kDefaultPromptId = 2;

class PromptError : public Error {
 public:
  using Error::Error;
};

enum class LegalApproach {
  kTRRAC,
  kCLEO,
  kILAC,
  kIRAACP,
  kIRREAC,
  kIGPAC,
  kIPAAC,
  kIRRAC,
  kIRAC,
};

struct LegalApproachInfo {
  LegalApproach approach;
  std::string_view acronym;
  std::string_view expansion;
};

// All nine schemas, in table order.
const std::array<LegalApproachInfo, 9>& LegalApproaches();
const LegalApproachInfo& Describe(LegalApproach approach);
// Case-sensitive acronym lookup; throws PromptError for unknown names.
LegalApproach ParseLegalApproach(std::string_view acronym);

// Byte layout of a rendered prompt. Every part is joined by `separator`.
// With `section_labels` the premise and hypothesis are prefixed by their
// labels and a space. Exemplar labels are always emitted so answers can be
// located in few-shot prompts.
struct LayoutSpec {
  bool section_labels = true;
  std::string premise_label = "Premise:";
  std::string hypothesis_label = "Hypothesis:";
  std::string question_label = "Question:";
  std::string answer_label = "Answer:";
  std::string separator = "\n";

  bool operator==(const LayoutSpec&) const = default;
};

enum class StrategyKind { kZeroShot, kFewShot, kZeroShotCoT, kLegalReasoning };

struct Strategy {
  StrategyKind kind = StrategyKind::kZeroShot;
  int prompt_id = kDefaultPromptId;
  int shots = 0;
  LegalApproach approach = LegalApproach::kIRAC;
  LayoutSpec layout;

  static Strategy ZeroShot(int prompt_id, LayoutSpec layout = {});
  static Strategy FewShot(int shots, LayoutSpec layout = {});
  static Strategy ZeroShotCoT(LayoutSpec layout = {});
  static Strategy LegalReasoning(LegalApproach approach, LayoutSpec layout = {});

  // Short stable name: "zs-p2", "fs-3", "zscot", "lr-TRRAC".
  std::string Descriptor() const;
  // Throws PromptError when prompt_id or shots are out of range.
  void Validate() const;
};

enum class PromptStage { kSingle, kCotStage1, kCotStage2 };
std::string_view StageName(PromptStage stage);

struct RenderedPrompt {
  std::string text;
  Strategy strategy;
  std::string case_id;
  PromptStage stage = PromptStage::kSingle;
};

// Zero-shot instruction strings, ids 1..3.
std::string_view ZeroShotPromptText(int prompt_id);

// "True" / "False".
std::string_view LabelTruthWord(GoldLabel label);

// Premise, hypothesis and the closing question without any instruction.
std::string RenderTargetBlock(const EntailmentCase& c, const LayoutSpec& layout);

RenderedPrompt RenderZeroShot(const EntailmentCase& c, int prompt_id,
                              const LayoutSpec& layout = {});

// The first `shots` bank entries, then the zero-shot rendering of
// the target. Rejects exemplars whose question equals the target hypothesis.
RenderedPrompt RenderFewShot(const EntailmentCase& c, const ExemplarBank& bank,
                             int shots, int prompt_id = kDefaultPromptId,
                             const LayoutSpec& layout = {});

RenderedPrompt RenderCotStage1(const EntailmentCase& c,
                               int prompt_id = kDefaultPromptId,
                               const LayoutSpec& layout = {});

// stage1 text, the stage-1 completion verbatim, then the answer trigger.
RenderedPrompt RenderCotStage2(const RenderedPrompt& stage1,
                               std::string_view reasoning);

RenderedPrompt RenderLegalReasoning(const EntailmentCase& c,
                                    LegalApproach approach,
                                    const LayoutSpec& layout = {});

// Label-conditioned explanation request.
RenderedPrompt RenderExplainRequest(const EntailmentCase& c, GoldLabel label,
                                    const LayoutSpec& layout = {});

// Dispatches on strategy.kind. For kZeroShotCoT this is stage 1.
RenderedPrompt Render(const EntailmentCase& c, const Strategy& strategy,
                      const ExemplarBank* bank);

}  // namespace lexentail

#endif  // LEXENTAIL_PROMPT_H_
