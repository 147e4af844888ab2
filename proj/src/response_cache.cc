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

#include "lexentail/response_cache.h"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "lexentail/error.h"

namespace lexentail {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kTempMarker = ".tmp-";

bool IsTemp(const fs::path& p) {
  return p.filename().string().find(kTempMarker) != std::string::npos;
}

std::optional<nlohmann::json> ReadJson(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = nlohmann::json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

}  // namespace

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ResponseCache::PathFor(std::string_view key) const {
  if (key.size() < 2) throw Error("cache key too short");
  return dir_ / std::string(key.substr(0, 2)) / (std::string(key) + ".json");
}

std::optional<nlohmann::json> ResponseCache::Load(std::string_view key) const {
  return ReadJson(PathFor(key));
}

void ResponseCache::Store(std::string_view key, const nlohmann::json& doc) const {
  static std::atomic<unsigned long> counter{0};
  fs::path target = PathFor(key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error("cannot create cache directory: " + ec.message());

  std::ostringstream suffix;
  suffix << kTempMarker << std::this_thread::get_id() << "-" << counter++;
  fs::path temp = target;
  temp += suffix.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    out.close();
    if (!out) {
      fs::remove(temp, ec);
      throw Error("cannot write cache record " + temp.string());
    }
  }
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error("cannot publish cache record " + target.string());
  }
}

ResponseCache::Stats ResponseCache::Collect() const {
  Stats stats;
  std::error_code ec;
  if (!fs::exists(dir_, ec)) return stats;
  for (const auto& entry : fs::recursive_directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file()) continue;
    if (IsTemp(entry.path())) {
      ++stats.temp_files;
    } else if (entry.path().extension() == ".json") {
      if (ReadJson(entry.path())) {
        ++stats.records;
        stats.bytes += entry.file_size();
      } else {
        ++stats.corrupt;
      }
    }
  }
  return stats;
}

std::size_t ResponseCache::Prune(std::optional<std::chrono::hours> older_than) const {
  std::error_code ec;
  if (!fs::exists(dir_, ec)) return 0;
  std::vector<fs::path> doomed;
  const auto now = fs::file_time_type::clock::now();
  for (const auto& entry : fs::recursive_directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (IsTemp(p)) {
      doomed.push_back(p);
    } else if (p.extension() == ".json") {
      if (!ReadJson(p)) {
        doomed.push_back(p);
      } else if (older_than && now - entry.last_write_time() > *older_than) {
        doomed.push_back(p);
      }
    }
  }
  std::size_t removed = 0;
  for (const auto& p : doomed) {
    if (fs::remove(p, ec)) ++removed;
  }
  return removed;
}

}  // namespace lexentail
