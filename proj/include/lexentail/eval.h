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

#ifndef LEXENTAIL_EVAL_H_
#define LEXENTAIL_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexentail/corpus.h"
#include "lexentail/error.h"
#include "lexentail/llm.h"
#include "lexentail/prompt.h"
#include "lexentail/verdict.h"

namespace lexentail {

// How AMBIGUOUS and ABSENT extractions enter the accuracy.
enum class ScoringPolicy {
  kUnscoredIncorrect,  // counted as wrong; denominator is the corpus size
  kExcludeUnscored,    // dropped from the denominator
};
std::string_view PolicyName(ScoringPolicy policy);
ScoringPolicy ParsePolicy(std::string_view name);

struct CaseResult {
  std::string case_id;
  // One entry per stage, in stage order.
  std::vector<std::string> prompts;
  std::vector<std::string> completions;
  std::vector<std::string> cache_keys;
  ExtractionResult extraction;
  std::optional<Verdict> predicted;
  GoldLabel gold = GoldLabel::kYes;
  bool correct = false;
};

struct OutcomeCounts {
  std::size_t correct = 0;
  std::size_t incorrect = 0;  // clear but wrong
  std::size_t ambiguous = 0;
  std::size_t absent = 0;
  std::size_t total() const { return correct + incorrect + ambiguous + absent; }
  bool operator==(const OutcomeCounts&) const = default;
};

struct RunReport {
  std::string strategy;
  std::string corpus_name;
  std::string corpus_digest;
  std::string model;
  ScoringPolicy policy = ScoringPolicy::kUnscoredIncorrect;
  // Sorted by case id.
  std::vector<CaseResult> results;
  OutcomeCounts counts;
  double accuracy = 0;

  // Denominator used for `accuracy` under `policy`.
  std::size_t scored() const;
};

// Exact quotient. Throws Error when total is 0 or correct > total.
double Accuracy(std::size_t correct, std::size_t total);
// correct/total rounded half-up to four decimals, in exact integer
// arithmetic.
double RoundedAccuracy(std::size_t correct, std::size_t total);
// "0.7407"
std::string FormatAccuracy(double accuracy);

// The unique k in [0, total] with round4(k / total) == reported, if exactly
// one exists.
std::optional<std::size_t> QuantizeCheck(double reported, std::size_t total);

struct Delta {
  double points = 0;            // 100 * (run - baseline)
  double relative_percent = 0;  // 100 * (run / baseline - 1)
};
Delta Compare(double run_accuracy, double baseline_accuracy);

// Accuracy of the best competition system per test year.
struct BaselineTable {
  std::map<int, double> entries = {{2021, 0.7037}, {2022, 0.6789}};
  std::optional<double> For(int year) const;
};

enum class TieBreak { kAbstain, kFalse };

// Strict majority of the present verdicts. Ties and all-absent inputs
// abstain unless `tie_break` is kFalse, which resolves ties to FALSE.
std::optional<Verdict> EnsembleVote(std::span<const std::optional<Verdict>> votes,
                                    TieBreak tie_break = TieBreak::kAbstain);

// Per-case votes over a strategies x cases matrix: out[j] votes over
// runs[*][j]. All rows must have the same length.
std::vector<std::optional<Verdict>> EnsembleColumns(
    std::span<const std::vector<std::optional<Verdict>>> runs, TieBreak tie_break,
    int workers);
std::vector<std::optional<Verdict>> EnsembleColumnsSerial(
    std::span<const std::vector<std::optional<Verdict>>> runs, TieBreak tie_break);

// Combines runs over the same cases. Throws Error when the case sets, gold
// labels or corpus digests differ.
RunReport EnsembleReports(std::span<const RunReport> runs,
                          TieBreak tie_break = TieBreak::kAbstain);

struct RunOptions {
  std::string model;
  ScoringPolicy policy = ScoringPolicy::kUnscoredIncorrect;
  int workers = 1;
  const ExemplarBank* bank = nullptr;
};

// Thrown when a backend error stops a run; carries the cases that finished.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, RunReport partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

// Renders, completes and extracts one case. Chain-of-thought makes two
// calls, feeding the stage-1 completion into the answer prompt.
CaseResult RunCase(const EntailmentCase& c, const Strategy& strategy,
                   CompletionClient& client, const RunOptions& options);

// Fans cases out over options.workers OpenMP threads.
RunReport RunStrategy(const Corpus& corpus, const Strategy& strategy,
                      CompletionClient& client, const RunOptions& options);
// Reference implementation: one case after another.
RunReport RunStrategySerial(const Corpus& corpus, const Strategy& strategy,
                            CompletionClient& client, const RunOptions& options);

// Pure fold: sorts by id, counts outcomes, computes accuracy.
RunReport Aggregate(std::string strategy, const Corpus& corpus, std::string model,
                    ScoringPolicy policy, std::vector<CaseResult> results);

nlohmann::json StrategyToJson(const Strategy& strategy);
Strategy StrategyFromJson(const nlohmann::json& doc);

nlohmann::json ReportToJson(const RunReport& report);
RunReport ReportFromJson(const nlohmann::json& doc);
// Header "id,gold,predicted,status,correct", one row per case.
std::string ReportCsv(const RunReport& report);
void PrintReportTable(const RunReport& report, std::ostream& out,
                      std::optional<std::pair<int, double>> baseline = std::nullopt);

struct RunManifest {
  nlohmann::json strategy;
  std::string strategy_descriptor;
  std::string corpus_name;
  std::string corpus_digest;
  std::size_t case_count = 0;
  std::string model;
  std::string backend;
  ScoringPolicy policy = ScoringPolicy::kUnscoredIncorrect;
  std::string timestamp;  // empty in deterministic mode
  std::map<std::string, std::vector<std::string>> cache_keys;
};

RunManifest MakeManifest(const RunReport& report, const Strategy& strategy,
                         std::string backend, std::string timestamp);
nlohmann::json ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(const nlohmann::json& doc);

// Writes manifest.json, report.json and report.csv into `dir`.
void WriteRunArtifacts(const std::filesystem::path& dir, const RunReport& report,
                       const RunManifest& manifest);
// Reads report.json and manifest.json back from a run directory.
std::pair<RunReport, RunManifest> ReadRunArtifacts(const std::filesystem::path& dir);

}  // namespace lexentail

#endif  // LEXENTAIL_EVAL_H_
