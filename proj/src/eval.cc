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

#include "lexentail/eval.h"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>

namespace lexentail {
namespace {

constexpr long long kScale = 10000;

// round_half_up(10000 * k / n)
long long ScaledRound(std::size_t k, std::size_t n) {
  auto kk = static_cast<long long>(k);
  auto nn = static_cast<long long>(n);
  return (2 * kk * kScale + nn) / (2 * nn);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

nlohmann::json OptionalVerdictJson(const std::optional<Verdict>& v) {
  if (!v) return nullptr;
  return std::string(VerdictName(*v));
}

std::optional<Verdict> OptionalVerdictFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  std::string s = j.get<std::string>();
  if (s == "TRUE") return Verdict::kTrue;
  if (s == "FALSE") return Verdict::kFalse;
  throw Error("bad verdict '" + s + "' in report");
}

ExtractionStatus StatusFromName(const std::string& s) {
  if (s == "CLEAR") return ExtractionStatus::kClear;
  if (s == "AMBIGUOUS") return ExtractionStatus::kAmbiguous;
  if (s == "ABSENT") return ExtractionStatus::kAbsent;
  throw Error("bad extraction status '" + s + "' in report");
}

GoldLabel LabelFromName(const std::string& s) {
  if (s == "YES") return GoldLabel::kYes;
  if (s == "NO") return GoldLabel::kNo;
  throw Error("bad gold label '" + s + "' in report");
}

std::string_view KindName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kZeroShot: return "zs";
    case StrategyKind::kFewShot: return "fs";
    case StrategyKind::kZeroShotCoT: return "zscot";
    case StrategyKind::kLegalReasoning: return "lr";
  }
  return "unknown";
}

void CheckRunnable(const Strategy& strategy, const RunOptions& options) {
  strategy.Validate();
  if (strategy.kind == StrategyKind::kFewShot) {
    std::size_t bank = options.bank != nullptr ? options.bank->size() : 0;
    if (static_cast<std::size_t>(strategy.shots) > bank) {
      throw PromptError("shots exceeds exemplar bank (" +
                        std::to_string(strategy.shots) + " > " +
                        std::to_string(bank) + ")");
    }
  }
}

CompletionRecord Call(CompletionClient& client, const RunOptions& options,
                      const RenderedPrompt& prompt, int max_tokens,
                      CaseResult& result) {
  CompletionRequest req;
  req.model = options.model;
  req.input = prompt.text;
  req.params.max_tokens = max_tokens;
  req.stage_tag = std::string(StageName(prompt.stage));
  result.prompts.push_back(prompt.text);
  result.cache_keys.push_back(CacheKey(req));
  CompletionRecord rec = client.Complete(req);
  result.completions.push_back(rec.completion);
  return rec;
}

}  // namespace

std::string_view PolicyName(ScoringPolicy policy) {
  return policy == ScoringPolicy::kUnscoredIncorrect ? "incorrect" : "exclude";
}

ScoringPolicy ParsePolicy(std::string_view name) {
  if (name == "incorrect") return ScoringPolicy::kUnscoredIncorrect;
  if (name == "exclude") return ScoringPolicy::kExcludeUnscored;
  throw Error("scoring policy must be 'incorrect' or 'exclude', got '" +
              std::string(name) + "'");
}

std::size_t RunReport::scored() const {
  return policy == ScoringPolicy::kUnscoredIncorrect
             ? counts.total()
             : counts.correct + counts.incorrect;
}

double Accuracy(std::size_t correct, std::size_t total) {
  if (total == 0) throw Error("accuracy over zero cases");
  if (correct > total) throw Error("more correct answers than cases");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double RoundedAccuracy(std::size_t correct, std::size_t total) {
  Accuracy(correct, total);
  return static_cast<double>(ScaledRound(correct, total)) / kScale;
}

std::string FormatAccuracy(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f",
                static_cast<double>(std::llround(accuracy * kScale)) / kScale);
  return buf;
}

std::optional<std::size_t> QuantizeCheck(double reported, std::size_t total) {
  if (total == 0 || !(reported >= 0 && reported <= 1)) return std::nullopt;
  const long long target = std::llround(reported * kScale);
  std::optional<std::size_t> found;
  for (std::size_t k = 0; k <= total; ++k) {
    long long r = ScaledRound(k, total);
    if (r == target) {
      if (found) return std::nullopt;
      found = k;
    } else if (r > target) {
      break;
    }
  }
  return found;
}

Delta Compare(double run_accuracy, double baseline_accuracy) {
  if (!(baseline_accuracy > 0)) throw Error("baseline accuracy must be positive");
  return {100.0 * (run_accuracy - baseline_accuracy),
          100.0 * (run_accuracy / baseline_accuracy - 1.0)};
}

std::optional<double> BaselineTable::For(int year) const {
  auto it = entries.find(year);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

std::optional<Verdict> EnsembleVote(std::span<const std::optional<Verdict>> votes,
                                    TieBreak tie_break) {
  std::size_t yes = 0;
  std::size_t no = 0;
  for (const auto& v : votes) {
    if (!v) continue;
    (*v == Verdict::kTrue ? yes : no) += 1;
  }
  if (yes > no) return Verdict::kTrue;
  if (no > yes) return Verdict::kFalse;
  if (yes > 0 && tie_break == TieBreak::kFalse) return Verdict::kFalse;
  return std::nullopt;
}

std::vector<std::optional<Verdict>> EnsembleColumns(
    std::span<const std::vector<std::optional<Verdict>>> runs, TieBreak tie_break,
    int workers) {
  if (runs.empty()) return {};
  const std::size_t cases = runs[0].size();
  for (const auto& row : runs) {
    if (row.size() != cases) throw Error("ensemble rows differ in length");
  }
  std::vector<std::optional<Verdict>> out(cases);
  const long n = static_cast<long>(cases);
#pragma omp parallel num_threads(std::max(1, workers))
  {
    std::vector<std::optional<Verdict>> column(runs.size());
#pragma omp for schedule(static)
    for (long j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < runs.size(); ++i) column[i] = runs[i][j];
      out[j] = EnsembleVote(column, tie_break);
    }
  }
  return out;
}

std::vector<std::optional<Verdict>> EnsembleColumnsSerial(
    std::span<const std::vector<std::optional<Verdict>>> runs, TieBreak tie_break) {
  if (runs.empty()) return {};
  const std::size_t cases = runs[0].size();
  std::vector<std::optional<Verdict>> out;
  out.reserve(cases);
  for (std::size_t j = 0; j < cases; ++j) {
    std::vector<std::optional<Verdict>> column;
    for (const auto& row : runs) {
      if (row.size() != cases) throw Error("ensemble rows differ in length");
      column.push_back(row[j]);
    }
    out.push_back(EnsembleVote(column, tie_break));
  }
  return out;
}

RunReport EnsembleReports(std::span<const RunReport> runs, TieBreak tie_break) {
  if (runs.size() < 2) throw Error("an ensemble needs at least two runs");
  const RunReport& first = runs[0];
  for (const auto& r : runs) {
    if (r.corpus_digest != first.corpus_digest) {
      throw Error("corpus digest mismatch between runs '" + first.strategy +
                  "' and '" + r.strategy + "'");
    }
    if (r.results.size() != first.results.size()) {
      throw Error("runs cover different numbers of cases");
    }
    for (std::size_t j = 0; j < r.results.size(); ++j) {
      if (r.results[j].case_id != first.results[j].case_id ||
          r.results[j].gold != first.results[j].gold) {
        throw Error("runs disagree on case '" + first.results[j].case_id + "'");
      }
    }
  }

  std::vector<std::vector<std::optional<Verdict>>> matrix;
  for (const auto& r : runs) {
    std::vector<std::optional<Verdict>> row;
    for (const auto& c : r.results) row.push_back(c.predicted);
    matrix.push_back(std::move(row));
  }
  auto votes = EnsembleColumnsSerial(matrix, tie_break);

  std::vector<CaseResult> results;
  for (std::size_t j = 0; j < votes.size(); ++j) {
    CaseResult c;
    c.case_id = first.results[j].case_id;
    c.gold = first.results[j].gold;
    c.predicted = votes[j];
    c.extraction.verdict = votes[j];
    bool any = false;
    for (const auto& row : matrix) any = any || row[j].has_value();
    c.extraction.status = votes[j]   ? ExtractionStatus::kClear
                          : any      ? ExtractionStatus::kAmbiguous
                                     : ExtractionStatus::kAbsent;
    c.correct = votes[j] && VerdictToLabel(*votes[j]) == c.gold;
    results.push_back(std::move(c));
  }

  std::string name = "ensemble(";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i > 0) name += ",";
    name += runs[i].strategy;
  }
  name += ")";

  RunReport out;
  out.strategy = name;
  out.corpus_name = first.corpus_name;
  out.corpus_digest = first.corpus_digest;
  out.model = first.model;
  out.policy = first.policy;
  out.results = std::move(results);
  for (const auto& c : out.results) {
    if (c.correct) ++out.counts.correct;
    else if (c.extraction.status == ExtractionStatus::kClear) ++out.counts.incorrect;
    else if (c.extraction.status == ExtractionStatus::kAmbiguous) ++out.counts.ambiguous;
    else ++out.counts.absent;
  }
  out.accuracy = out.scored() == 0 ? 0.0 : Accuracy(out.counts.correct, out.scored());
  return out;
}

CaseResult RunCase(const EntailmentCase& c, const Strategy& strategy,
                   CompletionClient& client, const RunOptions& options) {
  CaseResult result;
  result.case_id = c.id;
  result.gold = c.label;

  if (strategy.kind == StrategyKind::kZeroShotCoT) {
    RenderedPrompt stage1 = Render(c, strategy, options.bank);
    CompletionRecord reasoning =
        Call(client, options, stage1, kReasoningMaxTokens, result);
    if (reasoning.completion.empty()) {
      result.extraction = ExtractionResult{};
    } else {
      RenderedPrompt stage2 = RenderCotStage2(stage1, reasoning.completion);
      CompletionRecord answer = Call(client, options, stage2, kAnswerMaxTokens, result);
      result.extraction = ExtractVerdict(answer.completion);
    }
  } else {
    RenderedPrompt prompt = Render(c, strategy, options.bank);
    CompletionRecord answer = Call(client, options, prompt, kAnswerMaxTokens, result);
    result.extraction = ExtractVerdict(answer.completion);
  }
  result.predicted = result.extraction.verdict;
  result.correct =
      result.predicted.has_value() && VerdictToLabel(*result.predicted) == c.label;
  return result;
}

RunReport Aggregate(std::string strategy, const Corpus& corpus, std::string model,
                    ScoringPolicy policy, std::vector<CaseResult> results) {
  RunReport report;
  report.strategy = std::move(strategy);
  report.corpus_name = corpus.name;
  report.corpus_digest = CorpusDigest(corpus);
  report.model = std::move(model);
  report.policy = policy;
  std::sort(results.begin(), results.end(),
            [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });
  report.results = std::move(results);
  for (const auto& r : report.results) {
    if (r.correct) {
      ++report.counts.correct;
    } else {
      switch (r.extraction.status) {
        case ExtractionStatus::kClear: ++report.counts.incorrect; break;
        case ExtractionStatus::kAmbiguous: ++report.counts.ambiguous; break;
        case ExtractionStatus::kAbsent: ++report.counts.absent; break;
      }
    }
  }
  std::size_t denom = report.scored();
  report.accuracy = denom == 0 ? 0.0 : Accuracy(report.counts.correct, denom);
  return report;
}

RunReport RunStrategy(const Corpus& corpus, const Strategy& strategy,
                      CompletionClient& client, const RunOptions& options) {
  CheckRunnable(strategy, options);
  const long n = static_cast<long>(corpus.size());
  std::vector<std::optional<CaseResult>> slots(corpus.size());
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::string failure;

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, options.workers))
  for (long i = 0; i < n; ++i) {
    if (stop.load()) continue;
    try {
      slots[i] = RunCase(corpus.cases[i], strategy, client, options);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      if (failure.empty()) {
        failure = "case '" + corpus.cases[i].id + "': " + e.what();
      }
      stop = true;
    }
  }

  std::vector<CaseResult> results;
  for (auto& s : slots) {
    if (s) results.push_back(std::move(*s));
  }
  RunReport report = Aggregate(strategy.Descriptor(), corpus, options.model,
                               options.policy, std::move(results));
  if (!failure.empty()) throw RunAborted(failure, std::move(report));
  return report;
}

RunReport RunStrategySerial(const Corpus& corpus, const Strategy& strategy,
                            CompletionClient& client, const RunOptions& options) {
  CheckRunnable(strategy, options);
  std::vector<CaseResult> results;
  for (const auto& c : corpus.cases) {
    try {
      results.push_back(RunCase(c, strategy, client, options));
    } catch (const std::exception& e) {
      RunReport partial = Aggregate(strategy.Descriptor(), corpus, options.model,
                                    options.policy, std::move(results));
      throw RunAborted("case '" + c.id + "': " + e.what(), std::move(partial));
    }
  }
  return Aggregate(strategy.Descriptor(), corpus, options.model, options.policy,
                   std::move(results));
}

nlohmann::json StrategyToJson(const Strategy& s) {
  nlohmann::json j = {
      {"kind", KindName(s.kind)},
      {"descriptor", s.Descriptor()},
      {"prompt_id", s.prompt_id},
      {"layout",
       {{"section_labels", s.layout.section_labels},
        {"premise_label", s.layout.premise_label},
        {"hypothesis_label", s.layout.hypothesis_label},
        {"question_label", s.layout.question_label},
        {"answer_label", s.layout.answer_label},
        {"separator", s.layout.separator}}},
  };
  if (s.kind == StrategyKind::kFewShot) j["shots"] = s.shots;
  if (s.kind == StrategyKind::kLegalReasoning) {
    j["approach"] = std::string(Describe(s.approach).acronym);
  }
  return j;
}

Strategy StrategyFromJson(const nlohmann::json& j) {
  Strategy s;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "zs") s.kind = StrategyKind::kZeroShot;
  else if (kind == "fs") s.kind = StrategyKind::kFewShot;
  else if (kind == "zscot") s.kind = StrategyKind::kZeroShotCoT;
  else if (kind == "lr") s.kind = StrategyKind::kLegalReasoning;
  else throw Error("unknown strategy kind '" + kind + "'");
  s.prompt_id = j.at("prompt_id").get<int>();
  if (j.contains("shots")) s.shots = j["shots"].get<int>();
  if (j.contains("approach")) {
    s.approach = ParseLegalApproach(j["approach"].get<std::string>());
  }
  if (j.contains("layout")) {
    const auto& l = j["layout"];
    s.layout.section_labels = l.value("section_labels", true);
    s.layout.premise_label = l.value("premise_label", s.layout.premise_label);
    s.layout.hypothesis_label = l.value("hypothesis_label", s.layout.hypothesis_label);
    s.layout.question_label = l.value("question_label", s.layout.question_label);
    s.layout.answer_label = l.value("answer_label", s.layout.answer_label);
    s.layout.separator = l.value("separator", s.layout.separator);
  }
  return s;
}

nlohmann::json ReportToJson(const RunReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json span = nullptr;
    if (r.extraction.matched_span) {
      span = {{"offset", r.extraction.matched_span->offset},
              {"length", r.extraction.matched_span->length}};
    }
    results.push_back({
        {"id", r.case_id},
        {"gold", LabelName(r.gold)},
        {"predicted", OptionalVerdictJson(r.predicted)},
        {"status", StatusName(r.extraction.status)},
        {"matched_span", span},
        {"correct", r.correct},
        {"prompts", r.prompts},
        {"completions", r.completions},
        {"cache_keys", r.cache_keys},
    });
  }
  return {
      {"strategy", report.strategy},
      {"corpus", report.corpus_name},
      {"corpus_digest", report.corpus_digest},
      {"model", report.model},
      {"policy", PolicyName(report.policy)},
      {"total", report.counts.total()},
      {"counts",
       {{"correct", report.counts.correct},
        {"incorrect", report.counts.incorrect},
        {"ambiguous", report.counts.ambiguous},
        {"absent", report.counts.absent}}},
      {"accuracy", report.accuracy},
      {"accuracy_rounded",
       report.scored() == 0 ? 0.0 : RoundedAccuracy(report.counts.correct, report.scored())},
      {"results", results},
  };
}

RunReport ReportFromJson(const nlohmann::json& doc) {
  RunReport report;
  report.strategy = doc.at("strategy").get<std::string>();
  report.corpus_name = doc.at("corpus").get<std::string>();
  report.corpus_digest = doc.at("corpus_digest").get<std::string>();
  report.model = doc.value("model", "");
  report.policy = ParsePolicy(doc.at("policy").get<std::string>());
  for (const auto& r : doc.at("results")) {
    CaseResult c;
    c.case_id = r.at("id").get<std::string>();
    c.gold = LabelFromName(r.at("gold").get<std::string>());
    c.predicted = OptionalVerdictFromJson(r.at("predicted"));
    c.extraction.verdict = c.predicted;
    c.extraction.status = StatusFromName(r.at("status").get<std::string>());
    if (r.contains("matched_span") && !r["matched_span"].is_null()) {
      c.extraction.matched_span = TextSpan{r["matched_span"].at("offset").get<std::size_t>(),
                                           r["matched_span"].at("length").get<std::size_t>()};
    }
    c.correct = r.at("correct").get<bool>();
    c.prompts = r.value("prompts", std::vector<std::string>{});
    c.completions = r.value("completions", std::vector<std::string>{});
    c.cache_keys = r.value("cache_keys", std::vector<std::string>{});
    report.results.push_back(std::move(c));
  }
  const auto& counts = doc.at("counts");
  report.counts.correct = counts.at("correct").get<std::size_t>();
  report.counts.incorrect = counts.at("incorrect").get<std::size_t>();
  report.counts.ambiguous = counts.at("ambiguous").get<std::size_t>();
  report.counts.absent = counts.at("absent").get<std::size_t>();
  report.accuracy = doc.at("accuracy").get<double>();
  return report;
}

std::string ReportCsv(const RunReport& report) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "id,gold,predicted,status,correct\n";
  for (const auto& r : report.results) {
    out += quote(r.case_id) + "," + std::string(LabelName(r.gold)) + ",";
    if (r.predicted) out += VerdictName(*r.predicted);
    out += "," + std::string(StatusName(r.extraction.status)) + ",";
    out += r.correct ? "1" : "0";
    out += "\n";
  }
  return out;
}

void PrintReportTable(const RunReport& report, std::ostream& out,
                      std::optional<std::pair<int, double>> baseline) {
  char line[160];
  auto row = [&](const char* key, const std::string& value) {
    std::snprintf(line, sizeof line, "%-12s %s\n", key, value.c_str());
    out << line;
  };
  row("strategy", report.strategy);
  row("corpus", report.corpus_name + " (" + std::to_string(report.counts.total()) +
                    " cases)");
  if (!report.model.empty()) row("model", report.model);
  row("policy", std::string(PolicyName(report.policy)));
  row("correct", std::to_string(report.counts.correct));
  row("incorrect", std::to_string(report.counts.incorrect));
  row("ambiguous", std::to_string(report.counts.ambiguous));
  row("absent", std::to_string(report.counts.absent));
  row("accuracy", FormatAccuracy(report.accuracy));
  if (baseline) {
    Delta d = Compare(report.accuracy, baseline->second);
    std::snprintf(line, sizeof line,
                  "vs %d winner (%s): %+.2f points, %+.2f%% relative\n",
                  baseline->first, FormatAccuracy(baseline->second).c_str(),
                  d.points, d.relative_percent);
    out << line;
  }
}

RunManifest MakeManifest(const RunReport& report, const Strategy& strategy,
                         std::string backend, std::string timestamp) {
  RunManifest m;
  m.strategy = StrategyToJson(strategy);
  m.strategy_descriptor = strategy.Descriptor();
  m.corpus_name = report.corpus_name;
  m.corpus_digest = report.corpus_digest;
  m.case_count = report.results.size();
  m.model = report.model;
  m.backend = std::move(backend);
  m.policy = report.policy;
  m.timestamp = std::move(timestamp);
  for (const auto& r : report.results) m.cache_keys[r.case_id] = r.cache_keys;
  return m;
}

nlohmann::json ManifestToJson(const RunManifest& m) {
  nlohmann::json j = {
      {"strategy", m.strategy},
      {"strategy_descriptor", m.strategy_descriptor},
      {"corpus", m.corpus_name},
      {"corpus_digest", m.corpus_digest},
      {"case_count", m.case_count},
      {"model", m.model},
      {"backend", m.backend},
      {"policy", PolicyName(m.policy)},
      {"cache_keys", m.cache_keys},
  };
  if (!m.timestamp.empty()) j["timestamp"] = m.timestamp;
  return j;
}

RunManifest ManifestFromJson(const nlohmann::json& j) {
  RunManifest m;
  m.strategy = j.at("strategy");
  m.strategy_descriptor = j.at("strategy_descriptor").get<std::string>();
  m.corpus_name = j.at("corpus").get<std::string>();
  m.corpus_digest = j.at("corpus_digest").get<std::string>();
  m.case_count = j.at("case_count").get<std::size_t>();
  m.model = j.value("model", "");
  m.backend = j.value("backend", "");
  m.policy = ParsePolicy(j.at("policy").get<std::string>());
  m.timestamp = j.value("timestamp", "");
  m.cache_keys =
      j.value("cache_keys", std::map<std::string, std::vector<std::string>>{});
  return m;
}

void WriteRunArtifacts(const std::filesystem::path& dir, const RunReport& report,
                       const RunManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create run directory " + dir.string());
  WriteText(dir / "manifest.json", ManifestToJson(manifest).dump(2) + "\n");
  WriteText(dir / "report.json", ReportToJson(report).dump(2) + "\n");
  WriteText(dir / "report.csv", ReportCsv(report));
}

std::pair<RunReport, RunManifest> ReadRunArtifacts(const std::filesystem::path& dir) {
  auto load = [&](const char* name) {
    std::string text = ReadFile(dir / name);
    auto doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw Error((dir / name).string() + " is not valid JSON");
    return doc;
  };
  try {
    return {ReportFromJson(load("report.json")), ManifestFromJson(load("manifest.json"))};
  } catch (const nlohmann::json::exception& e) {
    throw Error("run directory " + dir.string() + ": " + e.what());
  }
}

}  // namespace lexentail
