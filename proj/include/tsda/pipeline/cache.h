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

#ifndef TSDA_PIPELINE_CACHE_H_
#define TSDA_PIPELINE_CACHE_H_

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <mutex>
#include <set>
#include <string>

#include "json.hpp"
#include "tsda/common/error.h"

namespace tsda::pipeline {

/// A stage failed. what() names the stage and the cause; io() tells whether
/// the cause was an I/O error.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& cause, bool io)
      : Error("stage '" + stage + "' failed: " + cause), stage_(stage), io_(io) {}
  const std::string& stage() const { return stage_; }
  bool io() const { return io_; }

 private:
  std::string stage_;
  bool io_;
};

/// SHA-256 hex digest of the compact dump of `description`. Object keys keep
/// insertion order, so callers build descriptions in a fixed order.
std::string ContentKey(const nlohmann::ordered_json& description);

struct StageRef {
  std::string stage;
  std::string key;
  std::filesystem::path dir;
};

/// Directory-per-stage artifact cache. A stage lives in
/// <root>/<stage>-<first 16 hex of key>/ and is complete once its
/// stage.json (holding the full key and description) exists. Builders write
/// into a sibling ".partial" directory that is renamed on success, so a
/// failed build never leaves a directory that looks complete.
class StageCache {
 public:
  explicit StageCache(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path DirFor(const std::string& stage, const std::string& key) const;
  bool Has(const std::string& stage, const std::string& key) const;

  /// Returns the completed stage, running build(partial_dir) first when it
  /// is missing. Concurrent requests for the same stage wait for one
  /// builder. Exceptions from build are rethrown as StageError.
  StageRef Ensure(const std::string& stage, const nlohmann::ordered_json& description,
                  const std::function<void(const std::filesystem::path&)>& build,
                  bool* built = nullptr);

  /// Deletes a completed stage so the next Ensure rebuilds it.
  void Invalidate(const std::string& stage, const std::string& key);

 private:
  std::filesystem::path root_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::set<std::string> in_progress_;
};

}  // namespace tsda::pipeline

#endif  // TSDA_PIPELINE_CACHE_H_
