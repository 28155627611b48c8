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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"

namespace curator::litref {

// Dense row-major square matrix.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using CountMatrix = SquareMatrix<long long>;
using SimilarityMatrix = SquareMatrix<double>;

// How the DBSCAN epsilon is read against similarities: distance mode
// treats 1 - s <= eps as a neighbour, similarity mode s >= eps.
enum class EpsMode { kDistance, kSimilarity };

std::string_view to_string(EpsMode m);
EpsMode parse_eps_mode(std::string_view s);

struct RefineConfig {
  double percentile = 70.0;
  double dbscan_epsilon = 0.7;
  int min_pts = 5;
  int m_k = 10;
  std::map<std::size_t, int> m_k_per_cluster;  // cluster index -> override
  std::optional<int> target_size;              // search m_k in [5, 15]
  EpsMode eps_mode = EpsMode::kDistance;

  void validate() const;
};

// LC(v): in-edges of v from nodes of the graph.
std::map<std::string, int> local_citation_counts(const CitationGraph& g);

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
// Throws Error(kEmptyInput) on an empty input.
int nearest_rank_percentile(std::vector<int> values, double percentile);

// {v : LC(v) >= nearest-rank percentile of LC}.
std::set<std::string> percentile_filter(const std::map<std::string, int>& lc, double percentile);

// c_ij = #nodes citing both scope[i] and scope[j]; c_ii = LC(scope[i]).
// Rows/cols follow `scope` order.
CountMatrix cocitation_matrix(const CitationGraph& g, const std::vector<std::string>& scope);

// s_ij = c_ij / sqrt(c_ii c_jj) when both diagonals are positive, else 0;
// s_ii = 1 when c_ii > 0.
SimilarityMatrix normalized_similarity(const CountMatrix& c);

struct DbscanResult {
  std::vector<int> label;  // cluster index, or -1 for noise
  int cluster_count = 0;

  std::vector<std::vector<std::size_t>> clusters() const;
  std::vector<std::size_t> noise() const;
};

bool dbscan_neighbors(double similarity, double epsilon, EpsMode mode);

// Classical DBSCAN over the similarity matrix. N(i) = {j != i : neighbour},
// core iff |N(i)| + 1 >= min_pts. Points are visited in index order, so a
// border point joins the lowest-indexed cluster that reaches it.
DbscanResult dbscan_cluster(const SimilarityMatrix& s, double epsilon, int min_pts,
                            EpsMode mode = EpsMode::kDistance);

// CD(i) = sum over j in cluster of s_ij (self term included). Aligned with
// `cluster`.
std::vector<double> centrality_degree(const std::vector<std::size_t>& cluster,
                                      const SimilarityMatrix& s);

struct ClusterMember {
  std::string id;
  double centrality = 0.0;
  int lc = 0;
};

// Top-m per cluster by (CD desc, LC desc, id asc), unioned. m_k[c] applies
// to clusters[c].
std::set<std::string> select_top_per_cluster(const std::vector<std::vector<ClusterMember>>& clusters,
                                             const std::vector<int>& m_k);

struct RefineResult {
  std::map<std::string, int> lc;
  int lc_threshold = 0;
  std::set<std::string> v_prime;
  std::vector<std::vector<std::string>> clusters;
  std::set<std::string> noise;
  std::map<std::string, double> centrality;
  std::set<std::string> v_double_prime;
  std::vector<int> m_k;  // per cluster, as applied
};

nlohmann::json to_json(const RefineResult& r);

// Two-stage refinement: local-citation percentile filter, then co-citation
// DBSCAN with per-cluster centrality selection. Throws Error(kEmptyInput)
// on a graph without nodes.
RefineResult refine(const CitationGraph& g, const RefineConfig& cfg);

}  // namespace curator::litref
