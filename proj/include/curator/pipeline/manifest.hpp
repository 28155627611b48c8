// Copyright 2026 The Curator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace curator::pipeline {

std::string sha256_hex(const std::string& bytes);

// SHA-256 of a file. For a directory: SHA-256 over "relative/path\tdigest\n"
// lines of every regular file beneath it, sorted by path.
std::string path_digest(const std::filesystem::path& p);

struct FileRef {
  std::string name;  // "in", "out", "answers", "removals", ...
  std::string path;
  std::string sha256;

  bool operator==(const FileRef&) const = default;
};

struct Counts {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t dropped = 0;
  std::size_t parked = 0;

  bool operator==(const Counts&) const = default;
};

struct RunManifest {
  std::string run_id;
  std::string stage;
  std::vector<FileRef> inputs;
  std::vector<FileRef> outputs;
  nlohmann::json config = nlohmann::json::object();
  std::string started_at;
  std::string finished_at;
  Counts counts;
  bool noop = false;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

// Deterministic id from stage, input digests and config snapshot.
std::string make_run_id(const std::string& stage, const std::vector<FileRef>& inputs,
                        const nlohmann::json& config);

// Append-only manifest log (one JSON object per line).
class RunLog {
 public:
  explicit RunLog(std::filesystem::path file);

  std::vector<RunManifest> load() const;
  void append(const RunManifest& m) const;

  // The latest completed manifest with the same stage, inputs, config and
  // output paths whose outputs still exist with the recorded digests.
  std::optional<RunManifest> find_reusable(const std::string& stage,
                                           const std::vector<FileRef>& inputs,
                                           const nlohmann::json& config,
                                           const std::vector<std::string>& output_paths) const;

  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
};

}  // namespace curator::pipeline
