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

#include <sstream>

#include <gtest/gtest.h>

#include "lexentail/eval.h"
#include "test_util.h"

namespace lexentail {
namespace {

using testing::TempDir;

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = RunCli(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Corpus corpus = testing::SyntheticCorpus(6, 12, "mini");
    corpus.year = 2021;
    corpus_path_ = (dir_ / "mini.xml").string();
    testing::WriteText(corpus_path_, SerializeCorpus(corpus));
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& c : corpus.cases) {
      rules.push_back({{"pattern", "Hypothesis: " + c.hypothesis + "\n"},
                       {"completion", c.label == GoldLabel::kYes ? "True" : "False"}});
    }
    rules.push_back({{"pattern", "*"}, {"completion", "Because the statute says so."}});
    mock_path_ = (dir_ / "mock.json").string();
    testing::WriteText(mock_path_, rules.dump());
    cache_ = (dir_ / "cache").string();
  }

  std::vector<std::string> RunArgs(std::string run_dir) {
    return {"run", "--corpus", corpus_path_, "--backend", "mock:" + mock_path_,
            "--cache-dir", cache_, "--deterministic", "--run-dir", run_dir};
  }

  TempDir dir_;
  std::string corpus_path_, mock_path_, cache_;
};

TEST_F(CliTest, RunWritesArtifactsAndTable) {
  std::string run_dir = (dir_ / "run1").string();
  auto args = RunArgs(run_dir);
  args.insert(args.end(), {"--strategy", "lr", "--approach", "TRRAC", "--baseline-year",
                           "2021"});
  CliResult r = Invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy     1.0000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("vs 2021 winner (0.7037)"), std::string::npos);
  auto [report, manifest] = ReadRunArtifacts(run_dir);
  EXPECT_EQ(manifest.strategy["approach"], "TRRAC");
  EXPECT_EQ(manifest.backend, "mock:" + mock_path_);
  EXPECT_EQ(report.results.size(), 6u);
}

TEST_F(CliTest, WarmRerunIsByteIdentical) {
  std::string a = (dir_ / "a").string(), b = (dir_ / "b").string();
  ASSERT_EQ(Invoke(RunArgs(a)).status, 0);
  CliResult second = Invoke(RunArgs(b));
  ASSERT_EQ(second.status, 0);
  EXPECT_NE(second.err.find("backend calls: 0"), std::string::npos) << second.err;
  for (const char* f : {"report.json", "report.csv", "manifest.json"}) {
    EXPECT_EQ(ReadFile(std::filesystem::path(a) / f), ReadFile(std::filesystem::path(b) / f))
        << f;
  }
  auto replay = RunArgs((dir_ / "c").string());
  replay[4] = "cache";
  EXPECT_EQ(Invoke(replay).status, 0);
}

TEST_F(CliTest, ColdCacheWithoutBackendFails) {
  auto args = RunArgs((dir_ / "x").string());
  args[4] = "cache";
  CliResult r = Invoke(args);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("completion backend required"), std::string::npos) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "x" / "report.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(Invoke({}).status, 0);
  EXPECT_NE(Invoke({"run"}).status, 0);
  auto args = RunArgs((dir_ / "y").string());
  args.insert(args.end(), {"--workers", "0"});
  EXPECT_NE(Invoke(args).status, 0);
  args = RunArgs((dir_ / "y").string());
  args.insert(args.end(), {"--strategy", "fs", "--shots", "3"});
  CliResult r = Invoke(args);
  EXPECT_EQ(r.status, 1);
  args = RunArgs((dir_ / "y").string());
  args[4] = "grpc:somewhere";
  EXPECT_EQ(Invoke(args).status, 1);
}

TEST_F(CliTest, FewShotWithBank) {
  auto args = RunArgs((dir_ / "fs").string());
  args.insert(args.end(), {"--strategy", "fs", "--shots", "8", "--exemplars",
                           testing::DataPath("exemplars8.json").string()});
  CliResult r = Invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("fs-8"), std::string::npos);
}

TEST_F(CliTest, ExportFinetuneConfigs) {
  for (const char* config : {"1", "2", "3", "4"}) {
    std::string out = (dir_ / (std::string("ft") + config + ".jsonl")).string();
    CliResult r = Invoke({"export-finetune", "--corpus", corpus_path_, "--config", config,
                       "--out", out, "--backend", "mock:" + mock_path_, "--cache-dir",
                       cache_});
    ASSERT_EQ(r.status, 0) << config << ": " << r.err;
    EXPECT_TRUE(r.out.starts_with("6 records")) << r.out;
  }
  CliResult alias = Invoke({"export-finetune", "--corpus", corpus_path_, "--ft-config", "1",
                         "--out", (dir_ / "alias.jsonl").string()});
  EXPECT_EQ(alias.status, 0) << alias.err;
  CliResult cold = Invoke({"export-finetune", "--corpus", corpus_path_, "--config", "4",
                        "--out", (dir_ / "cold.jsonl").string(), "--cache-dir",
                        (dir_ / "empty-cache").string()});
  EXPECT_EQ(cold.status, 1);
  EXPECT_NE(cold.err.find("completion backend required"), std::string::npos) << cold.err;
  EXPECT_NE(Invoke({"export-finetune", "--corpus", corpus_path_, "--config", "5", "--out",
                 (dir_ / "bad.jsonl").string()})
                .status,
            0);
}

TEST_F(CliTest, EnsembleOfRunDirectories) {
  std::vector<std::string> dirs;
  for (const char* strategy : {"zs", "lr", "zscot"}) {
    std::string d = (dir_ / strategy).string();
    auto args = RunArgs(d);
    args.insert(args.end(), {"--strategy", strategy});
    ASSERT_EQ(Invoke(args).status, 0);
    dirs.push_back(d);
  }
  std::vector<std::string> args = {"ensemble"};
  args.insert(args.end(), dirs.begin(), dirs.end());
  args.insert(args.end(), {"--out-dir", (dir_ / "ens").string(), "--deterministic"});
  CliResult r = Invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("ensemble(zs-p2,lr-IRAC,zscot)"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "ens" / "report.csv"));

  Corpus other = testing::SyntheticCorpus(6, 99, "other");
  testing::WriteText(dir_ / "other.xml", SerializeCorpus(other));
  auto run_other = RunArgs((dir_ / "o").string());
  run_other[2] = (dir_ / "other.xml").string();
  run_other[4] = "mock:" + mock_path_;
  Invoke(run_other);
  CliResult mismatch = Invoke({"ensemble", dirs[0], (dir_ / "o").string()});
  EXPECT_EQ(mismatch.status, 1);
  EXPECT_NE(mismatch.err.find("digest mismatch"), std::string::npos) << mismatch.err;
}

TEST_F(CliTest, ValidateCorpusAndResults) {
  CliResult r = Invoke({"validate", "--corpus", corpus_path_});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("6 cases"), std::string::npos);
  testing::WriteText(dir_ / "ok.csv", "name,accuracy,total\na,0.8148,81\nb,0.6789,109\n");
  r = Invoke({"validate", "--results", (dir_ / "ok.csv").string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("= 66/81"), std::string::npos) << r.out;
  testing::WriteText(dir_ / "bad.csv", "name,accuracy,total\nc,0.9999,3\n");
  EXPECT_EQ(Invoke({"validate", "--results", (dir_ / "bad.csv").string()}).status, 1);
  testing::WriteText(dir_ / "broken.xml", "<dataset><pair id=\"z\" label=\"Q\"/></dataset>");
  CliResult broken = Invoke({"validate", "--corpus", (dir_ / "broken.xml").string()});
  EXPECT_EQ(broken.status, 1);
  EXPECT_NE(broken.err.find("z"), std::string::npos);
}

TEST_F(CliTest, ExplainPrintsOneLinePerCase) {
  CliResult r = Invoke({"explain", "--corpus", corpus_path_});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_TRUE(r.out.starts_with("S-001\t"));
}

TEST_F(CliTest, CacheStatsAndPrune) {
  ASSERT_EQ(Invoke(RunArgs((dir_ / "r").string())).status, 0);
  CliResult stats = Invoke({"cache", "stats", "--cache-dir", cache_});
  ASSERT_EQ(stats.status, 0);
  EXPECT_NE(stats.out.find("records    6"), std::string::npos) << stats.out;
  CliResult prune =
      Invoke({"cache", "prune", "--cache-dir", cache_, "--older-than-days", "0"});
  EXPECT_EQ(prune.status, 0);
  EXPECT_NE(prune.out.find("removed 6"), std::string::npos) << prune.out;
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
  testing::WriteText(dir_ / "lex.ini", "[run]\nstrategy = \"lr\"\napproach = \"CLEO\"\n");
  auto args = RunArgs((dir_ / "cfg").string());
  args.insert(args.begin(), {"--config", (dir_ / "lex.ini").string()});
  CliResult r = Invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("lr-CLEO"), std::string::npos) << r.out;
  args = RunArgs((dir_ / "cfg2").string());
  args.insert(args.begin(), {"--config", (dir_ / "lex.ini").string()});
  args.insert(args.end(), {"--approach", "ILAC"});
  r = Invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("lr-ILAC"), std::string::npos) << r.out;
}

TEST(CliHelpersTest, BackendDescriptorAndEscapes) {
  EXPECT_EQ(BackendDescriptor::Parse("mock:a.json").kind, BackendDescriptor::Kind::kMock);
  EXPECT_EQ(BackendDescriptor::Parse("remote:https://x/v1").target, "https://x/v1");
  EXPECT_EQ(BackendDescriptor::Parse("cache").ToString(), "cache");
  EXPECT_THROW(BackendDescriptor::Parse("mock:"), Error);
  EXPECT_THROW(BackendDescriptor::Parse("s3://bucket"), Error);
  EXPECT_EQ(DecodeEscapes("a\\nb\\tc\\\\d\\q"), "a\nb\tc\\d\\q");
}

}  // namespace
}  // namespace lexentail
