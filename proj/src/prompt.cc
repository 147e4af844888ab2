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

#include "lexentail/prompt.h"

#include <vector>

namespace lexentail {
namespace {

constexpr std::array<std::string_view, 3> kZeroShotPrompts = {
    "Please determine if the hypothesis is True or False based on the given "
    "premise.",
    "Please determine if the following hypothesis is True or False based on "
    "the given premise.",
    "Please determine if the following hypothesis is True or False based on "
    "the Japanese civil code statutes.",
};

constexpr std::array<LegalApproachInfo, 9> kApproaches = {{
    {LegalApproach::kTRRAC, "TRRAC", "Thesis, rule, rule, application, conclusion"},
    {LegalApproach::kCLEO, "CLEO", "Claim, law, evaluation, outcome"},
    {LegalApproach::kILAC, "ILAC", "Issue, law, application, conclusion"},
    {LegalApproach::kIRAACP, "IRAACP",
     "Issue, rule, apply, apply, conclusion, policy"},
    {LegalApproach::kIRREAC, "IRREAC",
     "Issue, rule, rule, application, conclusion"},
    {LegalApproach::kIGPAC, "IGPAC",
     "Issue, general rule, precedent, application, conclusion"},
    {LegalApproach::kIPAAC, "IPAAC",
     "Issue, principle, authority, application, conclusion"},
    {LegalApproach::kIRRAC, "IRRAC",
     "Issue, rule, reasoning, application, conclusion"},
    {LegalApproach::kIRAC, "IRAC", "Issue, rule, application, conclusion"},
}};

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string Labeled(bool enabled, std::string_view label, std::string_view body) {
  if (!enabled || label.empty()) return std::string(body);
  std::string out(label);
  out.push_back(' ');
  out.append(body);
  return out;
}

// Premise and hypothesis parts of the target block.
void AppendCaseParts(const EntailmentCase& c, const LayoutSpec& layout,
                     std::vector<std::string>& parts) {
  parts.push_back(Labeled(layout.section_labels, layout.premise_label, c.premise));
  parts.push_back(
      Labeled(layout.section_labels, layout.hypothesis_label, c.hypothesis));
}

void RequireCase(const EntailmentCase& c) {
  if (c.premise.empty() || c.hypothesis.empty()) {
    throw PromptError("case '" + c.id + "' has an empty premise or hypothesis");
  }
}

std::string_view Trimmed(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  std::size_t b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(kSpace) - b + 1);
}

}  // namespace

const std::array<LegalApproachInfo, 9>& LegalApproaches() { return kApproaches; }

const LegalApproachInfo& Describe(LegalApproach approach) {
  for (const auto& info : kApproaches) {
    if (info.approach == approach) return info;
  }
  throw PromptError("unknown legal reasoning approach");
}

LegalApproach ParseLegalApproach(std::string_view acronym) {
  for (const auto& info : kApproaches) {
    if (info.acronym == acronym) return info.approach;
  }
  throw PromptError("unknown legal reasoning approach '" +
                    std::string(acronym) + "'");
}

Strategy Strategy::ZeroShot(int prompt_id, LayoutSpec layout) {
  Strategy s;
  s.kind = StrategyKind::kZeroShot;
  s.prompt_id = prompt_id;
  s.layout = std::move(layout);
  return s;
}

Strategy Strategy::FewShot(int shots, LayoutSpec layout) {
  Strategy s;
  s.kind = StrategyKind::kFewShot;
  s.shots = shots;
  s.layout = std::move(layout);
  return s;
}

Strategy Strategy::ZeroShotCoT(LayoutSpec layout) {
  Strategy s;
  s.kind = StrategyKind::kZeroShotCoT;
  s.layout = std::move(layout);
  return s;
}

Strategy Strategy::LegalReasoning(LegalApproach approach, LayoutSpec layout) {
  Strategy s;
  s.kind = StrategyKind::kLegalReasoning;
  s.approach = approach;
  s.layout = std::move(layout);
  return s;
}

std::string Strategy::Descriptor() const {
  switch (kind) {
    case StrategyKind::kZeroShot:
      return "zs-p" + std::to_string(prompt_id);
    case StrategyKind::kFewShot:
      return "fs-" + std::to_string(shots);
    case StrategyKind::kZeroShotCoT:
      return "zscot";
    case StrategyKind::kLegalReasoning:
      return "lr-" + std::string(Describe(approach).acronym);
  }
  return "unknown";
}

void Strategy::Validate() const {
  if (prompt_id < 1 || prompt_id > 3) {
    throw PromptError("prompt id " + std::to_string(prompt_id) +
                      " out of range (1..3)");
  }
  if (kind == StrategyKind::kFewShot && shots < 0) {
    throw PromptError("shot count must not be negative");
  }
}

std::string_view StageName(PromptStage stage) {
  switch (stage) {
    case PromptStage::kSingle: return "single";
    case PromptStage::kCotStage1: return "cot_stage1";
    case PromptStage::kCotStage2: return "cot_stage2";
  }
  return "unknown";
}

std::string_view ZeroShotPromptText(int prompt_id) {
  if (prompt_id < 1 || prompt_id > 3) {
    throw PromptError("prompt id " + std::to_string(prompt_id) +
                      " out of range (1..3)");
  }
  return kZeroShotPrompts[prompt_id - 1];
}

std::string_view LabelTruthWord(GoldLabel label) {
  return label == GoldLabel::kYes ? "True" : "False";
}

std::string RenderTargetBlock(const EntailmentCase& c, const LayoutSpec& layout) {
  RequireCase(c);
  std::vector<std::string> parts;
  AppendCaseParts(c, layout, parts);
  parts.emplace_back(kTrueOrFalse);
  return Join(parts, layout.separator);
}

RenderedPrompt RenderZeroShot(const EntailmentCase& c, int prompt_id,
                              const LayoutSpec& layout) {
  std::string_view instruction = ZeroShotPromptText(prompt_id);
  RenderedPrompt out;
  out.text = std::string(instruction) + layout.separator +
             RenderTargetBlock(c, layout);
  out.strategy = Strategy::ZeroShot(prompt_id, layout);
  out.case_id = c.id;
  out.stage = PromptStage::kSingle;
  return out;
}

RenderedPrompt RenderFewShot(const EntailmentCase& c, const ExemplarBank& bank,
                             int shots, int prompt_id, const LayoutSpec& layout) {
  if (shots < 0) throw PromptError("shot count must not be negative");
  if (static_cast<std::size_t>(shots) > bank.size()) {
    throw PromptError("shots exceeds exemplar bank (" + std::to_string(shots) +
                      " > " + std::to_string(bank.size()) + ")");
  }
  std::vector<std::string> parts;
  for (int i = 0; i < shots; ++i) {
    const Exemplar& ex = bank.exemplars[i];
    if (Trimmed(ex.question) == Trimmed(c.hypothesis)) {
      throw PromptError("exemplar " + std::to_string(i) +
                        " repeats the hypothesis of case '" + c.id + "'");
    }
    parts.push_back(Labeled(true, layout.question_label, ex.question));
    parts.push_back(Labeled(true, layout.answer_label, LabelTruthWord(ex.answer)));
  }
  parts.push_back(RenderZeroShot(c, prompt_id, layout).text);

  RenderedPrompt out;
  out.text = Join(parts, layout.separator);
  out.strategy = Strategy::FewShot(shots, layout);
  out.strategy.prompt_id = prompt_id;
  out.case_id = c.id;
  return out;
}

RenderedPrompt RenderCotStage1(const EntailmentCase& c, int prompt_id,
                               const LayoutSpec& layout) {
  RequireCase(c);
  std::vector<std::string> parts;
  parts.emplace_back(ZeroShotPromptText(prompt_id));
  AppendCaseParts(c, layout, parts);
  parts.emplace_back(kCotTrigger);

  RenderedPrompt out;
  out.text = Join(parts, layout.separator);
  out.strategy = Strategy::ZeroShotCoT(layout);
  out.strategy.prompt_id = prompt_id;
  out.case_id = c.id;
  out.stage = PromptStage::kCotStage1;
  return out;
}

RenderedPrompt RenderCotStage2(const RenderedPrompt& stage1,
                               std::string_view reasoning) {
  if (stage1.stage != PromptStage::kCotStage1) {
    throw PromptError("answer extraction needs a stage-1 prompt, got " +
                      std::string(StageName(stage1.stage)));
  }
  if (reasoning.empty()) throw PromptError("empty reasoning for stage 2");
  const std::string& sep = stage1.strategy.layout.separator;
  RenderedPrompt out = stage1;
  out.text = stage1.text;
  out.text.append(sep);
  out.text.append(reasoning);
  out.text.append(sep);
  out.text.append(kAnswerTrigger);
  out.stage = PromptStage::kCotStage2;
  return out;
}

RenderedPrompt RenderLegalReasoning(const EntailmentCase& c,
                                    LegalApproach approach,
                                    const LayoutSpec& layout) {
  RequireCase(c);
  const LegalApproachInfo& info = Describe(approach);
  std::vector<std::string> parts;
  parts.emplace_back(kLegalReasoningInstruction);
  parts.push_back("Approach: " + std::string(info.acronym) + " (" +
                  std::string(info.expansion) + ")");
  AppendCaseParts(c, layout, parts);
  parts.emplace_back(kTrueOrFalse);

  RenderedPrompt out;
  out.text = Join(parts, layout.separator);
  out.strategy = Strategy::LegalReasoning(approach, layout);
  out.case_id = c.id;
  return out;
}

RenderedPrompt RenderExplainRequest(const EntailmentCase& c, GoldLabel label,
                                    const LayoutSpec& layout) {
  RequireCase(c);
  std::vector<std::string> parts;
  parts.push_back("Please explain why the following hypothesis is " +
                  std::string(LabelTruthWord(label)) +
                  " based on the given premise.");
  AppendCaseParts(c, layout, parts);

  RenderedPrompt out;
  out.text = Join(parts, layout.separator);
  out.strategy = Strategy::ZeroShot(kDefaultPromptId, layout);
  out.case_id = c.id;
  return out;
}

RenderedPrompt Render(const EntailmentCase& c, const Strategy& strategy,
                      const ExemplarBank* bank) {
  strategy.Validate();
  switch (strategy.kind) {
    case StrategyKind::kZeroShot:
      return RenderZeroShot(c, strategy.prompt_id, strategy.layout);
    case StrategyKind::kFewShot: {
      static const ExemplarBank kEmpty;
      return RenderFewShot(c, bank != nullptr ? *bank : kEmpty, strategy.shots,
                           strategy.prompt_id, strategy.layout);
    }
    case StrategyKind::kZeroShotCoT:
      return RenderCotStage1(c, strategy.prompt_id, strategy.layout);
    case StrategyKind::kLegalReasoning:
      return RenderLegalReasoning(c, strategy.approach, strategy.layout);
  }
  throw PromptError("unknown strategy kind");
}

}  // namespace lexentail
