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

#ifndef LEXENTAIL_TESTS_TEST_UTIL_H_
#define LEXENTAIL_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lexentail/corpus.h"

namespace lexentail::testing {

std::filesystem::path DataPath(std::string_view name);
std::filesystem::path GoldenPath(std::string_view name);
std::filesystem::path RepoDataPath(std::string_view name);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, std::string_view text);

struct SampleCompletion {
  std::string id;
  std::string premise;
  std::string hypothesis;
  std::string completion;
  std::string verdict;  // "TRUE" or "FALSE"
};
std::vector<SampleCompletion> LoadSampleCompletions();
EntailmentCase ArticleEighteenCase();

// Deterministic synthetic corpus. Case i is "<prefix>-NNN"; labels follow
// the seeded generator. Premises hold 2..6 sentences.
Corpus SyntheticCorpus(std::size_t n, std::uint32_t seed, std::string name = "synthetic");

// A random sentence of `words` lowercase pseudo-words, capitalised, ending in '.'.
std::string RandomSentence(std::mt19937& rng, int words);

// FIPS 180-4 SHA-256 written independently of the library, lowercase hex.
std::string ReferenceSha256(std::string_view data);

}  // namespace lexentail::testing

#endif  // LEXENTAIL_TESTS_TEST_UTIL_H_
