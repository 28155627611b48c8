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
#include <string>
#include <vector>

#include "curator/core/codec.hpp"
#include "curator/core/error.hpp"

namespace curator {

// One JSON value per nonblank line. Throws Error(kIo) if unreadable and
// Error(kValidation) on a malformed line (message carries the line number).
std::vector<Json> read_jsonl(const std::filesystem::path& path);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
  std::vector<T> out;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line;
    try {
      out.push_back(j.get<T>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ": record " + std::to_string(line) + ": " +
                      e.what());
    }
  }
  return out;
}

// Serializes each value as compact JSON followed by '\n'.
std::string to_jsonl(const std::vector<Json>& values);

template <typename T>
std::string to_jsonl_of(const std::vector<T>& values) {
  std::vector<Json> js;
  js.reserve(values.size());
  for (const auto& v : values) js.emplace_back(v);
  return to_jsonl(js);
}

// Writes to `<path>.tmp` then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace curator
