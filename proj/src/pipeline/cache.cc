// Copyright 2026  The tsda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tsda/pipeline/cache.h"

#include <fstream>

#include "tsda/common/hash.h"

namespace tsda::pipeline {

namespace fs = std::filesystem;

std::string ContentKey(const nlohmann::ordered_json& description) {
  return Sha256Hex(description.dump());
}

StageCache::StageCache(fs::path root) : root_(std::move(root)) {}

fs::path StageCache::DirFor(const std::string& stage, const std::string& key) const {
  return root_ / (stage + "-" + key.substr(0, 16));
}

bool StageCache::Has(const std::string& stage, const std::string& key) const {
  const fs::path meta = DirFor(stage, key) / "stage.json";
  std::ifstream is(meta);
  if (!is) return false;
  try {
    const auto j = nlohmann::json::parse(is);
    return j.at("key").get<std::string>() == key;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

StageRef StageCache::Ensure(const std::string& stage, const nlohmann::ordered_json& description,
                            const std::function<void(const fs::path&)>& build, bool* built) {
  nlohmann::ordered_json full;
  full["stage"] = stage;
  full["description"] = description;
  const std::string key = ContentKey(full);
  const fs::path dir = DirFor(stage, key);
  if (built) *built = false;

  const std::string token = stage + "/" + key;
  {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return !in_progress_.count(token); });
    if (Has(stage, key)) return {stage, key, dir};
    in_progress_.insert(token);
  }
  auto release = [&] {
    std::lock_guard<std::mutex> lock(mu_);
    in_progress_.erase(token);
    cv_.notify_all();
  };

  fs::path partial = dir;
  partial += ".partial";
  try {
    std::error_code ec;
    fs::remove_all(partial, ec);
    fs::remove_all(dir, ec);
    fs::create_directories(partial);
    build(partial);
    nlohmann::ordered_json meta;
    meta["key"] = key;
    meta["stage"] = stage;
    meta["description"] = description;
    std::ofstream os(partial / "stage.json");
    os << meta.dump(2) << '\n';
    os.close();
    if (!os) throw IoError("cannot write " + (partial / "stage.json").string());
    fs::rename(partial, dir);
  } catch (const StageError&) {
    release();
    throw;
  } catch (const IoError& e) {
    release();
    throw StageError(stage, e.what(), true);
  } catch (const fs::filesystem_error& e) {
    release();
    throw StageError(stage, e.what(), true);
  } catch (const std::exception& e) {
    release();
    throw StageError(stage, e.what(), false);
  }
  release();
  if (built) *built = true;
  return {stage, key, dir};
}

void StageCache::Invalidate(const std::string& stage, const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  fs::remove_all(DirFor(stage, key));
}

}  // namespace tsda::pipeline
