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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"
#include "curator/distiller/embedding.hpp"

namespace curator::distiller {

enum class KeepRule { kLongestText, kLowestId };

std::string_view to_string(KeepRule r);
KeepRule parse_keep_rule(std::string_view s);

struct DedupConfig {
  std::optional<int> k_clusters;  // nullopt = auto
  double epsilon = 0.05;          // cosine-distance radius
  KeepRule keep_rule = KeepRule::kLongestText;
  int max_iterations = 100;

  void validate() const;
};

// ceil(n / 1000) clamped to [1, 5000].
int auto_k(std::size_t n);

struct DedupMember {
  EmbeddingVector vector;
  std::size_t text_length = 0;
};

struct Removal {
  std::string removed_id;
  std::string kept_id;
  double distance = 0.0;
};

nlohmann::json to_json(const Removal& r);

struct EpsilonBallResult {
  std::vector<std::string> kept;
  std::vector<std::string> removed;
  std::vector<Removal> removals;  // aligned with `removed`
};

// Greedy pass in keep-rule priority order: a member within `epsilon` of an
// already kept member is removed (shadowed by the first such kept member),
// otherwise it is kept.
EpsilonBallResult epsilon_ball_dedup(std::span<const DedupMember> members, double epsilon,
                                     KeepRule keep_rule);

struct DedupResult {
  Corpus corpus;                  // survivors in input order
  std::vector<Removal> removals;  // in input order of the removed docs
  std::vector<int> cluster_of;    // per input document
  int k = 0;
};

DedupResult deduplicate_vectors(const Corpus& corpus, const std::vector<EmbeddingVector>& vectors,
                                const DedupConfig& cfg, std::uint64_t seed);

// Embeds, clusters, and removes epsilon-ball duplicates within each cluster.
// Throws Error(kEmptyInput) on an empty corpus.
DedupResult deduplicate(const Corpus& corpus, const DedupConfig& cfg, EmbeddingProvider& provider,
                        std::uint64_t seed, const EmbedOptions& embed_options = {});

}  // namespace curator::distiller
