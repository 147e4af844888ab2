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

#include "lexentail/explain.h"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>

#include "json.hpp"
#include "lexentail/digest.h"
#include "lexentail/llm.h"
#include "lexentail/remote_backend.h"

namespace lexentail {
namespace {

constexpr std::array<std::string_view, 10> kGuardedAbbreviations = {
    "art", "arts", "para", "paras", "no", "nos", "cf", "e.g", "i.e", "vs",
};

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool IsTerminator(char c) { return c == '.' || c == '?' || c == '!' || c == ';'; }

bool IsCloser(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool OpensSentence(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || c == '(';
}

// The '.' at `dot` ends a guarded abbreviation.
bool IsGuarded(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !IsSpace(text[b - 1]) && text[b - 1] != '(') --b;
  if (b == dot) return false;
  std::string word(text.substr(b, dot - b));
  for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto abbr : kGuardedAbbreviations) {
    if (word == abbr) return true;
  }
  return false;
}

// Length of a "(digits)" marker at `i` followed by whitespace or the end,
// or 0.
std::size_t ParagraphMarker(std::string_view text, std::size_t i) {
  if (i >= text.size() || text[i] != '(') return 0;
  std::size_t j = i + 1;
  while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
  if (j == i + 1 || j >= text.size() || text[j] != ')') return 0;
  ++j;
  if (j < text.size() && !IsSpace(text[j])) return 0;
  return j - i;
}

// `i` is preceded on its line only by blanks, and there is an earlier line.
bool AtLineStart(std::string_view text, std::size_t i) {
  std::size_t k = i;
  while (k > 0 && (text[k - 1] == ' ' || text[k - 1] == '\t')) --k;
  return k > 0 && (text[k - 1] == '\n' || text[k - 1] == '\r');
}

void Emit(std::string_view text, std::size_t begin, std::size_t end,
          SentenceSet& out) {
  while (begin < end && IsSpace(text[begin])) ++begin;
  while (end > begin && IsSpace(text[end - 1])) --end;
  if (begin == end) return;
  out.sentences.push_back(
      {out.sentences.size(), std::string(text.substr(begin, end - begin)), begin});
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0;
  const std::size_t n = a.size();
#pragma omp simd reduction(+ : sum)
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

PseudoExplanation SelectWithVectors(const SentenceSet& set,
                                    std::span<const EmbeddingVector> vectors,
                                    const EmbeddingVector& hypothesis) {
  double score = 0;
  std::size_t best = ArgmaxCosine(vectors, hypothesis, &score);
  return {set.sentences[best].text, best, score};
}

}  // namespace

SentenceSet SplitSentences(std::string_view text) {
  SentenceSet out;
  std::size_t start = 0;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c == '(' && AtLineStart(text, i) && ParagraphMarker(text, i) > 0) {
      Emit(text, start, i, out);
      start = i;
      continue;
    }
    if (!IsTerminator(c)) continue;
    if (c == '.' && IsGuarded(text, i)) continue;
    std::size_t end = i + 1;
    while (end < n && IsCloser(text[end])) ++end;
    if (end >= n || !IsSpace(text[end])) continue;
    std::size_t next = end;
    while (next < n && IsSpace(text[next])) ++next;
    if (next >= n || !OpensSentence(text[next])) continue;
    Emit(text, start, end, out);
    start = next;
    i = next - 1;
  }
  Emit(text, start, n, out);
  if (out.sentences.empty()) throw ExplainError("cannot split blank text");
  return out;
}

EmbeddingVector::EmbeddingVector(std::vector<double> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ExplainError("embedding has no components");
  for (double c : components_) {
    if (!std::isfinite(c)) throw ExplainError("embedding has a non-finite component");
  }
}

double EmbeddingVector::Norm() const {
  return std::sqrt(Dot(components_, components_));
}

EmbeddingVector EmbeddingVector::Scaled(double factor) const {
  std::vector<double> out(components_);
  for (double& c : out) c *= factor;
  return EmbeddingVector(std::move(out));
}

double Cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    throw ExplainError("embedding dimensions differ (" +
                       std::to_string(u.dimension()) + " vs " +
                       std::to_string(v.dimension()) + ")");
  }
  double nu = u.Norm();
  double nv = v.Norm();
  if (nu == 0 || nv == 0) throw ExplainError("cosine of a zero vector");
  double c = Dot(u.components(), v.components()) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

std::vector<std::string> LexicalEmbeddingBackend::Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || u >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::size_t LexicalEmbeddingBackend::Bucket(std::string_view token) {
  return static_cast<std::size_t>(Fnv1a(token) % kDimension);
}

EmbeddingVector LexicalEmbeddingBackend::Embed(std::string_view text) const {
  if (text.empty()) throw ExplainError("cannot embed empty text");
  std::vector<double> v(kDimension, 0.0);
  for (const auto& tok : Tokenize(text)) v[Bucket(tok)] += 1.0;
  double norm = std::sqrt(Dot(v, v));
  if (norm > 0) {
    for (double& c : v) c /= norm;
  }
  return EmbeddingVector(std::move(v));
}

RemoteEmbeddingBackend::RemoteEmbeddingBackend(std::string base_url,
                                               std::string model,
                                               std::string api_key,
                                               std::optional<ResponseCache> cache,
                                               RetryPolicy retry, Sleeper sleep)
    : base_url_(std::move(base_url)),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      cache_(std::move(cache)),
      retry_(retry),
      sleep_(std::move(sleep)) {}

std::string RemoteEmbeddingBackend::CacheKeyFor(std::string_view model,
                                                std::string_view text) {
  nlohmann::json req = {{"kind", "embedding"}, {"model", model}, {"input", text}};
  return Sha256Hex(req.dump());
}

EmbeddingVector RemoteEmbeddingBackend::Embed(std::string_view text) const {
  if (text.empty()) throw ExplainError("cannot embed empty text");
  const std::string key = CacheKeyFor(model_, text);
  if (cache_) {
    if (auto doc = cache_->Load(key)) {
      try {
        if (doc->at("request").at("input").get<std::string>() == text) {
          return EmbeddingVector(doc->at("embedding").get<std::vector<double>>());
        }
      } catch (const nlohmann::json::exception&) {
      }
    }
  }
  if (base_url_.empty()) {
    throw BackendError(BackendErrorKind::kUnavailable,
                       "embedding backend required (cache miss)");
  }
  std::vector<double> values;
  for (int attempt = 1;; ++attempt) {
    try {
      std::string body = PostJson(Endpoint::Parse(base_url_), "/embeddings",
                                  BuildEmbeddingPayload(model_, text), api_key_,
                                  std::chrono::seconds(60));
      values = ParseEmbeddingResponse(body);
      break;
    } catch (const BackendError& e) {
      if (!e.retryable()) throw;
      if (attempt >= retry_.max_attempts) {
        throw BackendError(BackendErrorKind::kRetriesExhausted,
                           std::string("embedding request failed: ") + e.what());
      }
      sleep_(retry_.DelayAfter(attempt));
    }
  }
  EmbeddingVector vec(values);
  if (cache_) {
    cache_->Store(key, {{"key", key},
                        {"request",
                         {{"kind", "embedding"}, {"model", model_}, {"input", text}}},
                        {"embedding", values}});
  }
  return vec;
}

std::size_t ArgmaxCosine(std::span<const EmbeddingVector> sentences,
                         const EmbeddingVector& hypothesis, double* best_score) {
  if (sentences.empty()) throw ExplainError("no sentences to choose from");
  std::size_t best = 0;
  double best_value = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    double s = sentences[i].Norm() == 0 ? 0.0 : Cosine(sentences[i], hypothesis);
    if (i == 0 || s > best_value + kScoreTieTolerance) {
      best = i;
      best_value = s;
    }
  }
  if (best_score != nullptr) *best_score = best_value;
  return best;
}

PseudoExplanation SelectPseudoExplanation(std::string_view premise,
                                          std::string_view hypothesis,
                                          const EmbeddingBackend& backend) {
  SentenceSet set = SplitSentences(premise);
  EmbeddingVector hyp = backend.Embed(hypothesis);
  if (hyp.Norm() == 0) throw ExplainError("hypothesis embeds to the zero vector");
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(set.size());
  for (const auto& s : set.sentences) vectors.push_back(backend.Embed(s.text));
  return SelectWithVectors(set, vectors, hyp);
}

std::vector<PseudoExplanation> SelectPseudoExplanations(
    std::span<const ExplanationTask> tasks, const EmbeddingBackend& backend,
    int workers) {
  std::vector<PseudoExplanation> out(tasks.size());
  std::exception_ptr failure;
  std::mutex mu;
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = SelectPseudoExplanation(tasks[i].premise, tasks[i].hypothesis, backend);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<PseudoExplanation> SelectPseudoExplanationsSerial(
    std::span<const ExplanationTask> tasks, const EmbeddingBackend& backend) {
  std::vector<PseudoExplanation> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    out.push_back(SelectPseudoExplanation(t.premise, t.hypothesis, backend));
  }
  return out;
}

}  // namespace lexentail
