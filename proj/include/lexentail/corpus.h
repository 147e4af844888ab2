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

#ifndef LEXENTAIL_CORPUS_H_
#define LEXENTAIL_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexentail/error.h"

namespace lexentail {

// Binary entailment answer. A "not Q" answer is kNo, never a separate case.
enum class GoldLabel { kYes, kNo };

// "YES" / "NO".
std::string_view LabelName(GoldLabel label);

struct EntailmentCase {
  std::string id;
  // Statute text. Several articles are stored as one block separated by
  // newlines.
  std::string premise;
  std::string hypothesis;
  GoldLabel label = GoldLabel::kYes;

  bool operator==(const EntailmentCase&) const = default;
};

struct Corpus {
  std::string name;
  std::optional<int> year;
  // Document order.
  std::vector<EntailmentCase> cases;

  std::size_t size() const { return cases.size(); }
  const EntailmentCase* Find(std::string_view id) const;
  bool operator==(const Corpus&) const = default;
};

struct Exemplar {
  std::string question;
  GoldLabel answer = GoldLabel::kYes;
  std::optional<std::string> commentary;

  bool operator==(const Exemplar&) const = default;
};

struct ExemplarBank {
  std::vector<Exemplar> exemplars;

  std::size_t size() const { return exemplars.size(); }
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

// Parses the pair-format XML:
//   <dataset><pair id="R02-1-U" label="N"><t1>premise</t1><t2>hyp</t2></pair>
// Input must be UTF-8. t1/t2 are trimmed; interior whitespace is kept. When
// t1 holds child elements (one per article) their trimmed texts are joined
// with '\n'. An optional `year` attribute on the root fills Corpus::year.
Corpus ParseCorpus(std::string_view source, std::string name);

// Reads a corpus file; the corpus is named after the file stem.
Corpus LoadCorpusFile(const std::filesystem::path& path);

// Pair-format XML that ParseCorpus reads back to an equal Corpus.
std::string SerializeCorpus(const Corpus& corpus);

// Content digest over (id, premise, hypothesis, label) of every case, in
// order. Independent of the corpus name and of file formatting.
std::string CorpusDigest(const Corpus& corpus);

// JSON array of {"question", "answer", "commentary"?}. Answers accept Y/N
// and True/False/Yes/No in any case, or JSON booleans.
ExemplarBank ParseExemplars(std::string_view source);
ExemplarBank LoadExemplarFile(const std::filesystem::path& path);

std::optional<GoldLabel> ParseExemplarAnswer(std::string_view token);

bool IsValidUtf8(std::string_view bytes);

// Whole-file read; throws Error when the file cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace lexentail

#endif  // LEXENTAIL_CORPUS_H_
