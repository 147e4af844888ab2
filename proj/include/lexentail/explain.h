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

#ifndef LEXENTAIL_EXPLAIN_H_
#define LEXENTAIL_EXPLAIN_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexentail/error.h"
#include "lexentail/rate_limit.h"
#include "lexentail/response_cache.h"

namespace lexentail {

class ExplainError : public Error {
 public:
  using Error::Error;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  // Byte offset of text[0] in the source.
  std::size_t offset = 0;
};

struct SentenceSet {
  std::vector<Sentence> sentences;
  std::size_t size() const { return sentences.size(); }
};

// Rule-based splitting for statute text. A sentence ends after '.', '?',
// '!' or ';' (optionally followed by closing quotes or brackets) when
// whitespace and then an uppercase letter, digit or '(' follow, unless the
// '.' closes a guarded abbreviation such as "Art." or "No.". A paragraph
// marker "(n)" at the start of a line also opens a sentence. Texts without
// any break come back as one sentence. Throws ExplainError on blank input.
SentenceSet SplitSentences(std::string_view text);

class EmbeddingVector {
 public:
  // Throws ExplainError for an empty or non-finite vector.
  explicit EmbeddingVector(std::vector<double> components);

  std::size_t dimension() const { return components_.size(); }
  std::span<const double> components() const { return components_; }
  double Norm() const;
  EmbeddingVector Scaled(double factor) const;

 private:
  std::vector<double> components_;
};

// dot(u, v) / (|u| |v|). Throws ExplainError on dimension mismatch or a
// zero vector.
double Cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// Implementations must be safe for concurrent calls.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  // Throws ExplainError on empty text.
  virtual EmbeddingVector Embed(std::string_view text) const = 0;
  virtual std::string id() const = 0;
};

// Offline bag-of-words encoder: lowercase word tokens hashed (FNV-1a) into
// kDimension buckets, term-frequency weighted, L2-normalized. Text without
// word tokens maps to the zero vector.
class LexicalEmbeddingBackend : public EmbeddingBackend {
 public:
  static constexpr std::size_t kDimension = 4096;

  EmbeddingVector Embed(std::string_view text) const override;
  std::string id() const override { return "lexical-4096"; }

  static std::vector<std::string> Tokenize(std::string_view text);
  static std::size_t Bucket(std::string_view token);
};

// OpenAI-compatible embeddings endpoint; responses are cached by the same
// content-addressed store as completions.
class RemoteEmbeddingBackend : public EmbeddingBackend {
 public:
  RemoteEmbeddingBackend(std::string base_url, std::string model,
                         std::string api_key, std::optional<ResponseCache> cache,
                         RetryPolicy retry = {}, Sleeper sleep = SystemSleeper());

  EmbeddingVector Embed(std::string_view text) const override;
  std::string id() const override { return "remote-embedding:" + model_; }

  static std::string CacheKeyFor(std::string_view model, std::string_view text);

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_;
  std::optional<ResponseCache> cache_;
  RetryPolicy retry_;
  Sleeper sleep_;
};

struct PseudoExplanation {
  std::string sentence;
  std::size_t index = 0;
  double score = 0;
};

// Scores closer than this are ties and go to the lower index.
inline constexpr double kScoreTieTolerance = 1e-12;

// Index of the best-scoring sentence; a sentence with a zero vector scores 0.
std::size_t ArgmaxCosine(std::span<const EmbeddingVector> sentences,
                         const EmbeddingVector& hypothesis, double* best_score);

// The premise sentence most similar to the hypothesis.
PseudoExplanation SelectPseudoExplanation(std::string_view premise,
                                          std::string_view hypothesis,
                                          const EmbeddingBackend& backend);

struct ExplanationTask {
  std::string_view premise;
  std::string_view hypothesis;
};

// Batch selection fanned out over `workers` OpenMP threads; result i belongs
// to task i. The first failure is rethrown after the loop.
std::vector<PseudoExplanation> SelectPseudoExplanations(
    std::span<const ExplanationTask> tasks, const EmbeddingBackend& backend,
    int workers);

// Single-threaded reference for the batch kernel.
std::vector<PseudoExplanation> SelectPseudoExplanationsSerial(
    std::span<const ExplanationTask> tasks, const EmbeddingBackend& backend);

}  // namespace lexentail

#endif  // LEXENTAIL_EXPLAIN_H_
