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

#include "lexentail/finetune.h"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace lexentail {

FinetuneConfig FinetuneConfig::FromId(int id) {
  switch (id) {
    case 1: return {1, false, CompletionKind::kLabel};
    case 2: return {2, true, CompletionKind::kLabel};
    case 3: return {3, true, CompletionKind::kLabelPlusPseudo};
    case 4: return {4, true, CompletionKind::kGeneratedExplanation};
  }
  throw FinetuneError("fine-tune config must be 1..4, got " + std::to_string(id));
}

std::vector<FinetuneRecord> BuildRecords(const Corpus& corpus,
                                         const FinetuneConfig& config,
                                         const FinetuneBackends& backends) {
  if (corpus.cases.empty()) throw FinetuneError("empty training corpus");
  const LayoutSpec& layout = backends.layout;

  std::vector<FinetuneRecord> records(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const EntailmentCase& c = corpus.cases[i];
    records[i].case_id = c.id;
    records[i].config_id = config.id;
    records[i].input_text = config.uses_prompt
                                ? RenderZeroShot(c, kDefaultPromptId, layout).text
                                : RenderTargetBlock(c, layout);
    records[i].completion_text = std::string(LabelTruthWord(c.label));
  }

  switch (config.completion_kind) {
    case CompletionKind::kLabel:
      break;
    case CompletionKind::kLabelPlusPseudo: {
      if (backends.embedding == nullptr) {
        throw FinetuneError("config 3 requires an embedding backend");
      }
      std::vector<ExplanationTask> tasks;
      tasks.reserve(corpus.size());
      for (const auto& c : corpus.cases) tasks.push_back({c.premise, c.hypothesis});
      auto picks = SelectPseudoExplanations(tasks, *backends.embedding, backends.workers);
      for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].completion_text += " ";
        records[i].completion_text += kBecauseAccordingTo;
        records[i].completion_text += picks[i].sentence;
      }
      break;
    }
    case CompletionKind::kGeneratedExplanation: {
      if (backends.completion == nullptr) {
        throw FinetuneError("completion backend required for config 4");
      }
      std::exception_ptr failure;
      std::mutex mu;
      const long n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, backends.workers))
      for (long i = 0; i < n; ++i) {
        const EntailmentCase& c = corpus.cases[i];
        try {
          CompletionRequest req;
          req.model = backends.model;
          req.input = RenderExplainRequest(c, c.label, layout).text;
          req.params.max_tokens = kAnswerMaxTokens;
          req.stage_tag = "explain";
          std::string text = backends.completion->Complete(req).completion;
          if (text.empty()) {
            throw FinetuneError("empty explanation for case '" + c.id + "'");
          }
          records[i].completion_text = std::move(text);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      break;
    }
  }
  return records;
}

FinetuneExample ToExample(const FinetuneRecord& record) {
  return {record.input_text, record.completion_text};
}

std::size_t SerializeJsonl(const std::vector<FinetuneRecord>& records,
                           std::ostream& sink) {
  if (records.empty()) throw FinetuneError("no records to serialize");
  std::size_t bytes = 0;
  for (const auto& r : records) {
    nlohmann::json line = {
        {"prompt", r.input_text},
        {"completion", " " + r.completion_text + std::string(kCompletionStop)},
    };
    std::string text = line.dump() + "\n";
    sink.write(text.data(), static_cast<std::streamsize>(text.size()));
    bytes += text.size();
  }
  sink.flush();
  if (!sink) throw FinetuneError("failed writing fine-tune export");
  return bytes;
}

std::vector<FinetuneExample> ParseJsonl(std::string_view source) {
  std::vector<FinetuneExample> out;
  std::istringstream in{std::string(source)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw FinetuneError(where + ": not a JSON object");
    }
    if (!doc.contains("prompt") || !doc["prompt"].is_string() ||
        !doc.contains("completion") || !doc["completion"].is_string()) {
      throw FinetuneError(where + ": needs string fields prompt and completion");
    }
    std::string completion = doc["completion"].get<std::string>();
    const std::string stop(kCompletionStop);
    if (completion.size() < 1 + stop.size() || completion[0] != ' ' ||
        completion.compare(completion.size() - stop.size(), stop.size(), stop) != 0) {
      throw FinetuneError(where + ": completion must start with a space and end with \"\\n###\"");
    }
    out.push_back({doc["prompt"].get<std::string>(),
                   completion.substr(1, completion.size() - 1 - stop.size())});
  }
  return out;
}

}  // namespace lexentail
