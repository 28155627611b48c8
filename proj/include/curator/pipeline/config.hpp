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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/bench/grading.hpp"
#include "curator/distiller/dedup.hpp"
#include "curator/gateway/agent.hpp"
#include "curator/gateway/embeddings.hpp"
#include "curator/ingest/filter.hpp"
#include "curator/litref/refine.hpp"
#include "curator/quality/loop.hpp"

namespace curator::pipeline {

// Flat key/value configuration. Keys look like "dedup.epsilon"; the file
// format is `key = value` lines with optional `[section]` headers.
class Config {
 public:
  // Every known key with its default value.
  static Config defaults();

  // Layers, later wins: defaults < file < flags < environment. Environment
  // names are CURATOR_ + the key upper-cased with '.' -> '_'
  // (CURATOR_DEDUP_EPSILON). Unknown keys throw Error(kConfig).
  static Config layered(const std::optional<std::filesystem::path>& file,
                        const std::map<std::string, std::string>& flags,
                        const std::map<std::string, std::string>& env);

  void set(const std::string& key, const std::string& value);  // known keys only
  const std::string& get(const std::string& key) const;
  bool has_value(const std::string& key) const { return !get(key).empty(); }

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t seed() const;

  // Keys starting with any of the prefixes, plus "seed".
  nlohmann::json snapshot(const std::vector<std::string>& prefixes) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Parses every typed key; throws Error(kConfig) naming the first bad one.
  void validate() const;

 private:
  void validate_keys() const;

  std::map<std::string, std::string> values_;
};

// The process environment as a map (CURATOR_* only).
std::map<std::string, std::string> curator_environment();

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin);

distiller::DedupConfig dedup_config(const Config& c);
litref::RefineConfig refine_config(const Config& c);
quality::LoopConfig loop_config(const Config& c);
ingest::FilterPolicy filter_policy(const Config& c);

// Agent profiles: parsing, expert, check, optimize, write_like_human, judge,
// strong, weak. The last two are expert-role handles on different models.
// The endpoint comes from CURATOR_<PROFILE>_BASE_URL, then CURATOR_BASE_URL;
// unset or "stub" selects the seeded offline stub, "replay:<file>" replays
// a transcript file.
gateway::AgentHandle make_agent(const std::string& profile, const Config& c,
                                const std::map<std::string, std::string>& env,
                                std::shared_ptr<gateway::TranscriptSink> sink);

// Endpoint for remote embeddings (dedup.embedding = remote), read from
// CURATOR_EMBEDDING_BASE_URL / CURATOR_EMBEDDING_API_KEY.
gateway::EmbeddingEndpoint make_embedding_endpoint(const Config& c,
                                                   const std::map<std::string, std::string>& env,
                                                   std::shared_ptr<gateway::TranscriptSink> sink);

}  // namespace curator::pipeline
