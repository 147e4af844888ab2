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

#include "lexentail/cli.h"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "lexentail/corpus.h"
#include "lexentail/explain.h"
#include "lexentail/finetune.h"
#include "lexentail/remote_backend.h"
#include "lexentail/response_cache.h"

namespace lexentail {
namespace fs = std::filesystem;

BackendDescriptor BackendDescriptor::Parse(const std::string& text) {
  BackendDescriptor d;
  if (text == "cache" || text.empty()) {
    d.kind = Kind::kCacheOnly;
  } else if (text.rfind("mock:", 0) == 0) {
    d.kind = Kind::kMock;
    d.target = text.substr(5);
  } else if (text.rfind("remote:", 0) == 0) {
    d.kind = Kind::kRemote;
    d.target = text.substr(7);
  } else {
    throw Error("backend must be mock:<rules.json>, remote:<url> or cache, got '" +
                text + "'");
  }
  if (d.kind != Kind::kCacheOnly && d.target.empty()) {
    throw Error("backend '" + text + "' names no target");
  }
  return d;
}

std::string BackendDescriptor::ToString() const {
  switch (kind) {
    case Kind::kMock: return "mock:" + target;
    case Kind::kRemote: return "remote:" + target;
    case Kind::kCacheOnly: return "cache";
  }
  return "cache";
}

void HarnessConfig::Validate() const {
  if (workers < 1) throw Error("--workers must be at least 1");
  if (requests_per_minute < 0) throw Error("--rpm must not be negative");
  if (model.empty()) throw Error("--model must not be empty");
}

std::shared_ptr<CompletionBackend> HarnessConfig::MakeBackend() const {
  switch (backend.kind) {
    case BackendDescriptor::Kind::kMock:
      return MockBackend::FromFile(backend.target);
    case BackendDescriptor::Kind::kRemote:
      return std::make_shared<RemoteCompletionBackend>(backend.target,
                                                       ApiKeyFromEnvironment());
    case BackendDescriptor::Kind::kCacheOnly:
      return nullptr;
  }
  return nullptr;
}

std::unique_ptr<CompletionClient> HarnessConfig::MakeClient() const {
  ClientOptions options;
  options.requests_per_minute = requests_per_minute;
  options.deterministic = deterministic;
  std::optional<ResponseCache> cache;
  if (cache_dir) cache.emplace(*cache_dir);
  return std::make_unique<CompletionClient>(MakeBackend(), std::move(cache),
                                            std::move(options));
}

std::string DecodeEscapes(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out.push_back(text[i]);
      continue;
    }
    char n = text[++i];
    switch (n) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(n);
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::system_clock;

std::string CompactTimestamp() {
  std::time_t now = Clock::to_time_t(Clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Options shared by every command that talks to a completion backend.
struct BackendFlags {
  std::string backend = "cache";
  std::string model = "text-davinci-002";
  std::string cache_dir = ".lex-entail-cache";
  bool no_cache = false;
  int workers = 1;
  double rpm = 0;
  bool deterministic = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("--backend", backend,
                    "mock:<rules.json>, remote:<base url> or cache")
        ->capture_default_str();
    cmd->add_option("--model", model, "Model identifier")->capture_default_str();
    cmd->add_option("--cache-dir", cache_dir, "Response cache directory")
        ->capture_default_str();
    cmd->add_flag("--no-cache", no_cache, "Bypass the response cache");
    cmd->add_option("--workers", workers, "Concurrent cases")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--rpm", rpm, "Request rate limit per minute (0 = off)")
        ->capture_default_str();
    cmd->add_flag("--deterministic", deterministic,
                  "Omit timestamps so reruns write identical files");
  }

  HarnessConfig ToConfig() const {
    HarnessConfig cfg;
    cfg.backend = BackendDescriptor::Parse(backend);
    cfg.model = model;
    if (!no_cache) cfg.cache_dir = cache_dir;
    cfg.workers = workers;
    cfg.requests_per_minute = rpm;
    cfg.deterministic = deterministic;
    cfg.Validate();
    return cfg;
  }
};

struct LayoutFlags {
  bool no_section_labels = false;
  std::string separator = "\\n";
  std::string premise_label = "Premise:";
  std::string hypothesis_label = "Hypothesis:";

  void Register(CLI::App* cmd) {
    cmd->add_flag("--no-section-labels", no_section_labels,
                  "Drop the Premise:/Hypothesis: labels");
    cmd->add_option("--separator", separator,
                    "Separator between prompt parts (escapes allowed)")
        ->capture_default_str();
    cmd->add_option("--premise-label", premise_label)->capture_default_str();
    cmd->add_option("--hypothesis-label", hypothesis_label)->capture_default_str();
  }

  LayoutSpec ToLayout() const {
    LayoutSpec l;
    l.section_labels = !no_section_labels;
    l.separator = DecodeEscapes(separator);
    l.premise_label = premise_label;
    l.hypothesis_label = hypothesis_label;
    return l;
  }
};

struct RunFlags {
  std::string corpus;
  std::string strategy = "zs";
  int prompt = kDefaultPromptId;
  int shots = 1;
  std::string approach = "IRAC";
  std::string exemplars;
  std::string scoring = "incorrect";
  std::optional<int> baseline_year;
  std::string run_dir;
  std::string runs_root = "runs";
};

struct ExportFlags {
  std::string corpus;
  int config = 2;
  std::string out;
  std::string embedding;
  std::string embedding_model = "text-embedding-ada-002";
};

struct EnsembleFlags {
  std::vector<std::string> runs;
  std::string tie_break = "abstain";
  std::string out_dir;
  bool deterministic = false;
  std::optional<int> baseline_year;
};

struct ValidateFlags {
  std::string corpus;
  std::string results;
};

struct ExplainFlags {
  std::string corpus;
  std::string embedding;
  std::string embedding_model = "text-embedding-ada-002";
  std::string cache_dir = ".lex-entail-cache";
  int workers = 1;
};

struct CacheFlags {
  std::string cache_dir = ".lex-entail-cache";
  std::optional<int> older_than_days;
  bool stats = false;
  bool prune = false;
};

Strategy StrategyFrom(const RunFlags& f, const LayoutSpec& layout) {
  Strategy s;
  if (f.strategy == "zs") {
    s = Strategy::ZeroShot(f.prompt, layout);
  } else if (f.strategy == "fs") {
    s = Strategy::FewShot(f.shots, layout);
    s.prompt_id = f.prompt;
  } else if (f.strategy == "zscot") {
    s = Strategy::ZeroShotCoT(layout);
    s.prompt_id = f.prompt;
  } else if (f.strategy == "lr") {
    s = Strategy::LegalReasoning(ParseLegalApproach(f.approach), layout);
  } else {
    throw Error("unknown strategy '" + f.strategy + "' (zs, fs, zscot, lr)");
  }
  s.Validate();
  return s;
}

std::optional<std::pair<int, double>> Baseline(std::optional<int> year) {
  if (!year) return std::nullopt;
  auto acc = BaselineTable{}.For(*year);
  if (!acc) throw Error("no baseline recorded for year " + std::to_string(*year));
  return std::make_pair(*year, *acc);
}

std::unique_ptr<EmbeddingBackend> MakeEmbedding(const std::string& descriptor,
                                                const std::string& model,
                                                const std::string& cache_dir) {
  if (descriptor.empty() || descriptor == "lexical") {
    return std::make_unique<LexicalEmbeddingBackend>();
  }
  if (descriptor.rfind("remote:", 0) == 0) {
    std::optional<ResponseCache> cache;
    if (!cache_dir.empty()) cache.emplace(cache_dir);
    return std::make_unique<RemoteEmbeddingBackend>(
        descriptor.substr(7), model, ApiKeyFromEnvironment(), std::move(cache));
  }
  throw Error("embedding backend must be lexical or remote:<url>, got '" +
              descriptor + "'");
}

int CmdRun(const RunFlags& f, const BackendFlags& bf, const LayoutFlags& lf,
           std::ostream& out, std::ostream& err) {
  HarnessConfig cfg = bf.ToConfig();
  cfg.layout = lf.ToLayout();
  cfg.policy = ParsePolicy(f.scoring);
  if (!f.exemplars.empty()) cfg.exemplars = f.exemplars;

  Strategy strategy = StrategyFrom(f, cfg.layout);
  Corpus corpus = LoadCorpusFile(f.corpus);
  std::optional<ExemplarBank> bank;
  if (cfg.exemplars) bank = LoadExemplarFile(*cfg.exemplars);
  auto baseline = Baseline(f.baseline_year);
  auto client = cfg.MakeClient();

  RunOptions options;
  options.model = cfg.model;
  options.policy = cfg.policy;
  options.workers = cfg.workers;
  options.bank = bank ? &*bank : nullptr;

  std::string stamp = cfg.deterministic ? "" : UtcTimestamp();
  fs::path dir = !f.run_dir.empty()
                     ? fs::path(f.run_dir)
                     : fs::path(f.runs_root) /
                           ((cfg.deterministic ? std::string("deterministic")
                                               : CompactTimestamp()) +
                            "-" + strategy.Descriptor());
  try {
    RunReport report = RunStrategy(corpus, strategy, *client, options);
    WriteRunArtifacts(dir, report,
                      MakeManifest(report, strategy, cfg.backend.ToString(), stamp));
    PrintReportTable(report, out, baseline);
    err << "run written to " << dir.string() << " (backend calls: "
        << client->backend_calls() << ")\n";
    return 0;
  } catch (const RunAborted& e) {
    WriteRunArtifacts(dir, e.partial(),
                      MakeManifest(e.partial(), strategy, cfg.backend.ToString(), stamp));
    err << "error: run aborted: " << e.what() << "\n"
        << "partial results (" << e.partial().results.size() << " cases) written to "
        << dir.string() << "\n";
    return 1;
  }
}

int CmdExport(const ExportFlags& f, const BackendFlags& bf, const LayoutFlags& lf,
              std::ostream& out, std::ostream& err) {
  HarnessConfig cfg = bf.ToConfig();
  cfg.layout = lf.ToLayout();
  FinetuneConfig config = FinetuneConfig::FromId(f.config);
  Corpus corpus = LoadCorpusFile(f.corpus);

  std::unique_ptr<EmbeddingBackend> embedding;
  std::unique_ptr<CompletionClient> client;
  FinetuneBackends backends;
  backends.model = cfg.model;
  backends.workers = cfg.workers;
  backends.layout = cfg.layout;
  if (config.completion_kind == CompletionKind::kLabelPlusPseudo) {
    embedding = MakeEmbedding(f.embedding, f.embedding_model,
                              cfg.cache_dir ? cfg.cache_dir->string() : "");
    backends.embedding = embedding.get();
  }
  if (config.completion_kind == CompletionKind::kGeneratedExplanation) {
    client = cfg.MakeClient();
    backends.completion = client.get();
  }

  auto records = BuildRecords(corpus, config, backends);
  std::ofstream sink(f.out, std::ios::binary | std::ios::trunc);
  if (!sink) throw Error("cannot open " + f.out + " for writing");
  std::size_t bytes = SerializeJsonl(records, sink);
  out << records.size() << " records (" << bytes << " bytes) written to " << f.out
      << "\n";
  if (client) err << "backend calls: " << client->backend_calls() << "\n";
  return 0;
}

int CmdEnsemble(const EnsembleFlags& f, std::ostream& out, std::ostream& err) {
  if (f.runs.size() < 2) throw Error("ensemble needs at least two run directories");
  std::vector<RunReport> reports;
  std::vector<RunManifest> manifests;
  for (const auto& dir : f.runs) {
    auto [report, manifest] = ReadRunArtifacts(dir);
    if (!manifests.empty() && manifest.corpus_digest != manifests[0].corpus_digest) {
      throw Error("corpus digest mismatch: " + dir + " was run on corpus '" +
                  manifest.corpus_name + "', " + f.runs[0] + " on '" +
                  manifests[0].corpus_name + "'");
    }
    reports.push_back(std::move(report));
    manifests.push_back(std::move(manifest));
  }
  TieBreak tie;
  if (f.tie_break == "abstain") tie = TieBreak::kAbstain;
  else if (f.tie_break == "false") tie = TieBreak::kFalse;
  else throw Error("--tie-break must be abstain or false");

  RunReport ensemble = EnsembleReports(reports, tie);
  PrintReportTable(ensemble, out, Baseline(f.baseline_year));

  if (!f.out_dir.empty()) {
    RunManifest m;
    m.strategy = nlohmann::json::array();
    for (const auto& mf : manifests) m.strategy.push_back(mf.strategy);
    m.strategy_descriptor = ensemble.strategy;
    m.corpus_name = ensemble.corpus_name;
    m.corpus_digest = ensemble.corpus_digest;
    m.case_count = ensemble.results.size();
    m.model = ensemble.model;
    m.backend = "ensemble";
    m.policy = ensemble.policy;
    m.timestamp = f.deterministic ? "" : UtcTimestamp();
    WriteRunArtifacts(f.out_dir, ensemble, m);
    err << "ensemble written to " << f.out_dir << "\n";
  }
  return 0;
}

// Reads "name,accuracy,total" rows (header optional) and checks each one.
int CmdValidate(const ValidateFlags& f, std::ostream& out, std::ostream& err) {
  if (f.corpus.empty() && f.results.empty()) {
    throw Error("validate needs --corpus and/or --results");
  }
  bool ok = true;
  if (!f.corpus.empty()) {
    Corpus corpus = LoadCorpusFile(f.corpus);
    std::size_t yes = 0;
    for (const auto& c : corpus.cases) yes += c.label == GoldLabel::kYes;
    out << "corpus " << corpus.name << ": " << corpus.size() << " cases, " << yes
        << " YES, " << corpus.size() - yes << " NO, digest "
        << CorpusDigest(corpus).substr(0, 16) << "\n";
  }
  if (!f.results.empty()) {
    std::istringstream in(ReadFile(f.results));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::stringstream ls(line);
      for (std::string col; std::getline(ls, col, ',');) cols.push_back(col);
      if (cols.size() != 3) {
        err << f.results << ":" << line_no << ": expected name,accuracy,total\n";
        ok = false;
        continue;
      }
      double reported;
      std::size_t total;
      try {
        reported = std::stod(cols[1]);
        total = std::stoul(cols[2]);
      } catch (const std::exception&) {
        if (line_no == 1) continue;  // header
        err << f.results << ":" << line_no << ": unparseable numbers\n";
        ok = false;
        continue;
      }
      auto k = QuantizeCheck(reported, total);
      char buf[200];
      if (k) {
        std::snprintf(buf, sizeof buf, "%-28s %s = %zu/%zu\n", cols[0].c_str(),
                      cols[1].c_str(), *k, total);
      } else {
        std::snprintf(buf, sizeof buf, "%-28s %s FAIL: no unique k/%zu\n",
                      cols[0].c_str(), cols[1].c_str(), total);
        ok = false;
      }
      out << buf;
    }
  }
  return ok ? 0 : 1;
}

int CmdExplain(const ExplainFlags& f, std::ostream& out) {
  Corpus corpus = LoadCorpusFile(f.corpus);
  auto backend = MakeEmbedding(f.embedding, f.embedding_model, f.cache_dir);
  std::vector<ExplanationTask> tasks;
  for (const auto& c : corpus.cases) tasks.push_back({c.premise, c.hypothesis});
  auto picks = SelectPseudoExplanations(tasks, *backend, f.workers);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof score, "%.6f", picks[i].score);
    out << corpus.cases[i].id << "\t" << picks[i].index << "\t" << score << "\t"
        << picks[i].sentence << "\n";
  }
  return 0;
}

int CmdCache(const CacheFlags& f, std::ostream& out) {
  ResponseCache cache(f.cache_dir);
  if (f.prune) {
    std::optional<std::chrono::hours> age;
    if (f.older_than_days) age = std::chrono::hours(24 * *f.older_than_days);
    out << "removed " << cache.Prune(age) << " files\n";
  }
  if (f.stats || !f.prune) {
    auto s = cache.Collect();
    out << "records    " << s.records << "\n"
        << "bytes      " << s.bytes << "\n"
        << "temp files " << s.temp_files << "\n"
        << "corrupt    " << s.corrupt << "\n";
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompting and evaluation harness for statute entailment"};
  app.name("lex-entail");
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with default option values")
      ->envname("LEX_ENTAIL_CONFIG");

  RunFlags run_flags;
  BackendFlags run_backend;
  LayoutFlags run_layout;
  auto* run = app.add_subcommand("run", "Evaluate one strategy over a corpus");
  run->add_option("--corpus", run_flags.corpus, "Corpus XML file")->required();
  run->add_option("--strategy", run_flags.strategy, "zs, fs, zscot or lr")
      ->capture_default_str();
  run->add_option("--prompt", run_flags.prompt, "Zero-shot prompt id (1..3)")
      ->capture_default_str();
  run->add_option("--shots", run_flags.shots, "Few-shot exemplar count")
      ->capture_default_str();
  run->add_option("--approach", run_flags.approach, "Legal reasoning acronym")
      ->capture_default_str();
  run->add_option("--exemplars", run_flags.exemplars, "Exemplar bank JSON");
  run->add_option("--scoring", run_flags.scoring,
                  "Unscored answers: incorrect or exclude")
      ->capture_default_str();
  run->add_option("--baseline-year", run_flags.baseline_year,
                  "Compare against that year's best system");
  run->add_option("--run-dir", run_flags.run_dir, "Output directory for this run");
  run->add_option("--runs-root", run_flags.runs_root,
                  "Parent of timestamped run directories")
      ->capture_default_str();
  run_backend.Register(run);
  run_layout.Register(run);

  ExportFlags export_flags;
  BackendFlags export_backend;
  LayoutFlags export_layout;
  auto* exp = app.add_subcommand("export-finetune", "Write a fine-tuning JSONL file");
  exp->add_option("--corpus", export_flags.corpus, "Training corpus XML")->required();
  exp->add_option("--config,--ft-config", export_flags.config,
                  "Dataset layout 1..4")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  exp->add_option("--out", export_flags.out, "JSONL output path")->required();
  exp->add_option("--embedding", export_flags.embedding,
                  "lexical (default) or remote:<url>");
  exp->add_option("--embedding-model", export_flags.embedding_model)
      ->capture_default_str();
  export_backend.Register(exp);
  export_layout.Register(exp);

  EnsembleFlags ens_flags;
  auto* ens = app.add_subcommand("ensemble", "Majority vote over finished runs");
  ens->add_option("runs", ens_flags.runs, "Run directories")->required();
  ens->add_option("--tie-break", ens_flags.tie_break, "abstain or false")
      ->capture_default_str();
  ens->add_option("--out-dir", ens_flags.out_dir, "Write the ensemble run here");
  ens->add_flag("--deterministic", ens_flags.deterministic, "Omit timestamps");
  ens->add_option("--baseline-year", ens_flags.baseline_year);

  ValidateFlags val_flags;
  auto* val = app.add_subcommand("validate",
                                 "Lint a corpus and check reported accuracies");
  val->add_option("--corpus", val_flags.corpus, "Corpus XML file");
  val->add_option("--results", val_flags.results, "CSV of name,accuracy,total");

  ExplainFlags expl_flags;
  auto* expl = app.add_subcommand("explain", "Print pseudo-explanations");
  expl->add_option("--corpus", expl_flags.corpus, "Corpus XML file")->required();
  expl->add_option("--embedding", expl_flags.embedding,
                   "lexical (default) or remote:<url>");
  expl->add_option("--embedding-model", expl_flags.embedding_model)
      ->capture_default_str();
  expl->add_option("--cache-dir", expl_flags.cache_dir)->capture_default_str();
  expl->add_option("--workers", expl_flags.workers)->check(CLI::PositiveNumber);

  CacheFlags cache_flags;
  auto* cache = app.add_subcommand("cache", "Inspect or prune the response cache");
  auto* stats = cache->add_subcommand("stats", "Count records");
  auto* prune = cache->add_subcommand("prune", "Remove stale or corrupt records");
  cache->require_subcommand(1);
  for (auto* sub : {stats, prune}) {
    sub->add_option("--cache-dir", cache_flags.cache_dir)->capture_default_str();
  }
  prune->add_option("--older-than-days", cache_flags.older_than_days)
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) return CmdRun(run_flags, run_backend, run_layout, out, err);
    if (*exp) return CmdExport(export_flags, export_backend, export_layout, out, err);
    if (*ens) return CmdEnsemble(ens_flags, out, err);
    if (*val) return CmdValidate(val_flags, out, err);
    if (*expl) return CmdExplain(expl_flags, out);
    if (*cache) {
      cache_flags.stats = stats->parsed();
      cache_flags.prune = prune->parsed();
      return CmdCache(cache_flags, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lexentail
