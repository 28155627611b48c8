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

#include "curator/distiller/dedup.hpp"

#include <algorithm>
#include <map>

#include "curator/core/error.hpp"
#include "curator/core/parallel.hpp"
#include "curator/distiller/kmeans.hpp"

namespace curator::distiller {

std::string_view to_string(KeepRule r) {
  return r == KeepRule::kLongestText ? "longest_text" : "lowest_id";
}

KeepRule parse_keep_rule(std::string_view s) {
  if (s == "longest_text") return KeepRule::kLongestText;
  if (s == "lowest_id") return KeepRule::kLowestId;
  throw Error(ErrorCode::kConfig, "unknown keep rule '" + std::string(s) + "'");
}

void DedupConfig::validate() const {
  require(epsilon > 0.0 && epsilon <= 2.0, "dedup epsilon must be in (0, 2]", ErrorCode::kConfig);
  if (k_clusters) require(*k_clusters >= 1, "k must be positive", ErrorCode::kConfig);
  require(max_iterations >= 1, "max_iterations must be >= 1", ErrorCode::kConfig);
}

int auto_k(std::size_t n) {
  std::size_t k = (n + 999) / 1000;
  return static_cast<int>(std::clamp<std::size_t>(k, 1, 5000));
}

nlohmann::json to_json(const Removal& r) {
  return {{"removed_id", r.removed_id}, {"kept_id", r.kept_id}, {"distance", r.distance}};
}

EpsilonBallResult epsilon_ball_dedup(std::span<const DedupMember> members, double epsilon,
                                     KeepRule keep_rule) {
  std::vector<std::size_t> order(members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = members[a];
    const auto& mb = members[b];
    if (keep_rule == KeepRule::kLongestText && ma.text_length != mb.text_length) {
      return ma.text_length > mb.text_length;
    }
    return ma.vector.doc_id < mb.vector.doc_id;
  });

  EpsilonBallResult out;
  std::vector<std::size_t> kept_idx;
  for (std::size_t i : order) {
    const auto& v = members[i].vector;
    std::optional<std::pair<std::size_t, double>> shadow;
    for (std::size_t k : kept_idx) {
      double d = cosine_distance(v, members[k].vector);
      if (d <= epsilon) {
        shadow = {k, d};
        break;
      }
    }
    if (shadow) {
      out.removed.push_back(v.doc_id);
      out.removals.push_back({v.doc_id, members[shadow->first].vector.doc_id, shadow->second});
    } else {
      kept_idx.push_back(i);
      out.kept.push_back(v.doc_id);
    }
  }
  return out;
}

DedupResult deduplicate_vectors(const Corpus& corpus, const std::vector<EmbeddingVector>& vectors,
                                const DedupConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto& docs = corpus.documents;
  if (docs.empty()) throw Error(ErrorCode::kEmptyInput, "cannot deduplicate an empty corpus");
  require(vectors.size() == docs.size(), "one embedding per document required",
          ErrorCode::kShapeMismatch);

  DedupResult result;
  result.k = std::min<int>(cfg.k_clusters.value_or(auto_k(docs.size())),
                           static_cast<int>(docs.size()));
  auto km = kmeans_cluster(vectors, result.k, seed, cfg.max_iterations);
  result.cluster_of = km.assignment;

  std::vector<std::vector<DedupMember>> clusters(result.k);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    clusters[km.assignment[i]].push_back({vectors[i], docs[i].text.size()});
  }
  std::vector<EpsilonBallResult> per_cluster(result.k);
  parallel_for(clusters.size(), [&](std::size_t c) {
    per_cluster[c] = epsilon_ball_dedup(clusters[c], cfg.epsilon, cfg.keep_rule);
  });

  std::map<std::string, Removal> removed;
  for (auto& pc : per_cluster) {
    for (auto& r : pc.removals) removed.emplace(r.removed_id, std::move(r));
  }
  for (const auto& doc : docs) {
    auto it = removed.find(doc.id);
    if (it == removed.end()) {
      result.corpus.documents.push_back(doc);
    } else {
      result.removals.push_back(it->second);
    }
  }
  result.corpus = recompute_stats(std::move(result.corpus));
  return result;
}

DedupResult deduplicate(const Corpus& corpus, const DedupConfig& cfg, EmbeddingProvider& provider,
                        std::uint64_t seed, const EmbedOptions& embed_options) {
  cfg.validate();
  if (corpus.documents.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot deduplicate an empty corpus");
  }
  return deduplicate_vectors(corpus, embed_corpus(corpus, provider, embed_options), cfg, seed);
}

}  // namespace curator::distiller
