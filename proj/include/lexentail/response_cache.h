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

#ifndef LEXENTAIL_RESPONSE_CACHE_H_
#define LEXENTAIL_RESPONSE_CACHE_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "json.hpp"

namespace lexentail {

// Content-addressed store of JSON documents, one file per digest:
//   <dir>/<first two hex digits>/<digest>.json
// Writes go to a temporary sibling and are renamed into place, so concurrent
// readers see either no record or a complete one.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path PathFor(std::string_view key) const;

  // Missing or unreadable records are misses.
  std::optional<nlohmann::json> Load(std::string_view key) const;
  void Store(std::string_view key, const nlohmann::json& doc) const;

  struct Stats {
    std::size_t records = 0;
    std::uintmax_t bytes = 0;
    std::size_t temp_files = 0;
    std::size_t corrupt = 0;
  };
  Stats Collect() const;

  // Deletes temporary leftovers and unparseable records, plus records whose
  // modification time is older than `older_than` when given. Returns the
  // number of files removed.
  std::size_t Prune(std::optional<std::chrono::hours> older_than) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace lexentail

#endif  // LEXENTAIL_RESPONSE_CACHE_H_
