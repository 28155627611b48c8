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

#include "curator/litref/refine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "curator/core/error.hpp"

namespace curator::litref {

std::string_view to_string(EpsMode m) {
  return m == EpsMode::kDistance ? "distance" : "similarity";
}

EpsMode parse_eps_mode(std::string_view s) {
  if (s == "distance") return EpsMode::kDistance;
  if (s == "similarity") return EpsMode::kSimilarity;
  throw Error(ErrorCode::kConfig, "unknown eps mode '" + std::string(s) + "'");
}

void RefineConfig::validate() const {
  require(percentile > 0.0 && percentile < 100.0, "percentile must be in (0,100)",
          ErrorCode::kConfig);
  require(dbscan_epsilon > 0.0 && dbscan_epsilon <= 1.0, "DBSCAN epsilon must be in (0,1]",
          ErrorCode::kConfig);
  require(min_pts >= 1, "min_pts must be >= 1", ErrorCode::kConfig);
  require(m_k >= 1, "m_k must be >= 1", ErrorCode::kConfig);
  for (const auto& [c, m] : m_k_per_cluster) require(m >= 1, "m_k must be >= 1", ErrorCode::kConfig);
  if (target_size) require(*target_size >= 1, "target size must be >= 1", ErrorCode::kConfig);
}

std::map<std::string, int> local_citation_counts(const CitationGraph& g) {
  std::map<std::string, int> lc;
  for (const auto& n : g.nodes) lc[n] = 0;
  for (const auto& e : g.edges) {
    auto it = lc.find(e.cited);
    if (it != lc.end() && lc.count(e.citer)) ++it->second;
  }
  return lc;
}

int nearest_rank_percentile(std::vector<int> values, double percentile) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // Guard against p/100*n landing a hair above an integer.
  double rank = std::ceil(percentile / 100.0 * n - 1e-9);
  std::size_t idx = static_cast<std::size_t>(std::clamp(rank, 1.0, n)) - 1;
  return values[idx];
}

std::set<std::string> percentile_filter(const std::map<std::string, int>& lc, double percentile) {
  if (lc.empty()) throw Error(ErrorCode::kEmptyInput, "no local citation counts");
  std::vector<int> values;
  values.reserve(lc.size());
  for (const auto& [id, v] : lc) values.push_back(v);
  const int theta = nearest_rank_percentile(std::move(values), percentile);
  std::set<std::string> out;
  for (const auto& [id, v] : lc) {
    if (v >= theta) out.insert(id);
  }
  return out;
}

CountMatrix cocitation_matrix(const CitationGraph& g, const std::vector<std::string>& scope) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < scope.size(); ++i) index.emplace(scope[i], i);
  std::unordered_map<std::string, bool> known;
  for (const auto& n : g.nodes) known.emplace(n, true);

  // For each citer, the scope members it cites.
  std::map<std::string, std::vector<std::size_t>> cites;
  for (const auto& e : g.edges) {
    if (!known.count(e.citer)) continue;
    auto it = index.find(e.cited);
    if (it != index.end()) cites[e.citer].push_back(it->second);
  }
  CountMatrix c(scope.size(), 0);
  for (auto& [citer, targets] : cites) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (std::size_t a : targets) {
      for (std::size_t b : targets) ++c(a, b);
    }
  }
  return c;
}

SimilarityMatrix normalized_similarity(const CountMatrix& c) {
  const std::size_t n = c.size();
  SimilarityMatrix s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (c(i, i) <= 0 || c(j, j) <= 0) continue;
      if (i == j) {
        s(i, j) = 1.0;
      } else {
        s(i, j) = static_cast<double>(c(i, j)) /
                  std::sqrt(static_cast<double>(c(i, i)) * static_cast<double>(c(j, j)));
      }
    }
  }
  return s;
}

std::vector<std::vector<std::size_t>> DbscanResult::clusters() const {
  std::vector<std::vector<std::size_t>> out(cluster_count);
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] >= 0) out[label[i]].push_back(i);
  }
  return out;
}

std::vector<std::size_t> DbscanResult::noise() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] < 0) out.push_back(i);
  }
  return out;
}

bool dbscan_neighbors(double similarity, double epsilon, EpsMode mode) {
  return mode == EpsMode::kDistance ? (1.0 - similarity) <= epsilon : similarity >= epsilon;
}

DbscanResult dbscan_cluster(const SimilarityMatrix& s, double epsilon, int min_pts, EpsMode mode) {
  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  const std::size_t n = s.size();
  auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && dbscan_neighbors(s(i, j), epsilon, mode)) out.push_back(j);
    }
    return out;
  };

  DbscanResult r;
  r.label.assign(n, kUnvisited);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.label[i] != kUnvisited) continue;
    auto nb = neighbors(i);
    if (static_cast<int>(nb.size()) + 1 < min_pts) {
      r.label[i] = kNoise;
      continue;
    }
    const int cluster = r.cluster_count++;
    r.label[i] = cluster;
    std::deque<std::size_t> queue(nb.begin(), nb.end());
    while (!queue.empty()) {
      std::size_t q = queue.front();
      queue.pop_front();
      if (r.label[q] == kNoise) r.label[q] = cluster;  // border point
      if (r.label[q] != kUnvisited) continue;
      r.label[q] = cluster;
      auto qn = neighbors(q);
      if (static_cast<int>(qn.size()) + 1 >= min_pts) {
        queue.insert(queue.end(), qn.begin(), qn.end());
      }
    }
  }
  return r;
}

std::vector<double> centrality_degree(const std::vector<std::size_t>& cluster,
                                      const SimilarityMatrix& s) {
  std::vector<double> cd(cluster.size(), 0.0);
  for (std::size_t a = 0; a < cluster.size(); ++a) {
    for (std::size_t b : cluster) cd[a] += s(cluster[a], b);
  }
  return cd;
}

std::set<std::string> select_top_per_cluster(const std::vector<std::vector<ClusterMember>>& clusters,
                                             const std::vector<int>& m_k) {
  require(m_k.size() == clusters.size(), "one m_k per cluster required",
          ErrorCode::kInvalidArgument);
  std::set<std::string> out;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    require(m_k[c] >= 1, "m_k must be >= 1", ErrorCode::kInvalidArgument);
    auto members = clusters[c];
    std::sort(members.begin(), members.end(), [](const ClusterMember& a, const ClusterMember& b) {
      if (a.centrality != b.centrality) return a.centrality > b.centrality;
      if (a.lc != b.lc) return a.lc > b.lc;
      return a.id < b.id;
    });
    const std::size_t take = std::min<std::size_t>(members.size(), m_k[c]);
    for (std::size_t i = 0; i < take; ++i) out.insert(members[i].id);
  }
  return out;
}

nlohmann::json to_json(const RefineResult& r) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : r.clusters) clusters.push_back(c);
  return {{"lc", r.lc},
          {"lc_threshold", r.lc_threshold},
          {"v_prime", r.v_prime},
          {"clusters", clusters},
          {"noise", r.noise},
          {"centrality", r.centrality},
          {"v_double_prime", r.v_double_prime},
          {"m_k", r.m_k}};
}

RefineResult refine(const CitationGraph& g, const RefineConfig& cfg) {
  cfg.validate();
  validate(g);
  if (g.nodes.empty()) throw Error(ErrorCode::kEmptyInput, "citation graph has no nodes");

  RefineResult r;
  r.lc = local_citation_counts(g);
  std::vector<int> values;
  for (const auto& [id, v] : r.lc) values.push_back(v);
  r.lc_threshold = nearest_rank_percentile(values, cfg.percentile);
  r.v_prime = percentile_filter(r.lc, cfg.percentile);

  // Scope in graph node order keeps DBSCAN visiting order tied to the input.
  std::vector<std::string> scope;
  for (const auto& n : g.nodes) {
    if (r.v_prime.count(n)) scope.push_back(n);
  }
  SimilarityMatrix s = normalized_similarity(cocitation_matrix(g, scope));
  DbscanResult db = dbscan_cluster(s, cfg.dbscan_epsilon, cfg.min_pts, cfg.eps_mode);

  std::vector<std::vector<ClusterMember>> members;
  for (const auto& cluster : db.clusters()) {
    auto cd = centrality_degree(cluster, s);
    std::vector<std::string> ids;
    std::vector<ClusterMember> m;
    for (std::size_t a = 0; a < cluster.size(); ++a) {
      const std::string& id = scope[cluster[a]];
      ids.push_back(id);
      r.centrality[id] = cd[a];
      m.push_back({id, cd[a], r.lc.at(id)});
    }
    r.clusters.push_back(std::move(ids));
    members.push_back(std::move(m));
  }
  for (std::size_t i : db.noise()) r.noise.insert(scope[i]);

  if (cfg.target_size) {
    int best_m = 5;
    long best_gap = -1;
    for (int m = 5; m <= 15; ++m) {
      long size = 0;
      for (const auto& c : r.clusters) size += std::min<long>(m, static_cast<long>(c.size()));
      long gap = std::labs(size - *cfg.target_size);
      if (best_gap < 0 || gap < best_gap) {
        best_gap = gap;
        best_m = m;
      }
    }
    r.m_k.assign(r.clusters.size(), best_m);
  } else {
    r.m_k.assign(r.clusters.size(), cfg.m_k);
    for (const auto& [c, m] : cfg.m_k_per_cluster) {
      if (c < r.m_k.size()) r.m_k[c] = m;
    }
  }
  r.v_double_prime = select_top_per_cluster(members, r.m_k);
  return r;
}

}  // namespace curator::litref
