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

#include <gtest/gtest.h>

#include <random>

#include "curator/core/codec.hpp"
#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/litref/refine.hpp"
#include "support.hpp"

namespace curator::litref {
namespace {

CitationGraph graph(std::vector<std::string> nodes, std::vector<CitationEdge> edges) {
  return {std::move(nodes), std::move(edges)};
}

CitationGraph random_graph(std::mt19937_64& rng, int n, double p) {
  CitationGraph g;
  for (int i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && u(rng) < p) g.edges.push_back({g.nodes[i], g.nodes[j]});
    }
  }
  return g;
}

TEST(LocalCitations, NoEdgesAllZero) {
  auto lc = local_citation_counts(graph({"A", "B"}, {}));
  EXPECT_EQ(lc.at("A"), 0);
  EXPECT_EQ(lc.at("B"), 0);
}

TEST(LocalCitations, DirectCount) {
  auto lc = local_citation_counts(graph({"A", "B", "C"}, {{"A", "C"}, {"B", "C"}}));
  EXPECT_EQ(lc.at("C"), 2);
  EXPECT_EQ(lc.at("A"), 0);
  EXPECT_EQ(lc.at("B"), 0);
}

TEST(LocalCitations, MatchesAdjacencyColumnSums) {
  std::mt19937_64 rng(30);
  auto g = random_graph(rng, 30, 0.15);
  std::vector<std::vector<int>> adj(30, std::vector<int>(30, 0));
  for (const auto& e : g.edges) adj[std::stoi(e.citer.substr(1))][std::stoi(e.cited.substr(1))] = 1;
  auto lc = local_citation_counts(g);
  for (int j = 0; j < 30; ++j) {
    int col = 0;
    for (int i = 0; i < 30; ++i) col += adj[i][j];
    EXPECT_EQ(lc.at("n" + std::to_string(j)), col);
  }
}

TEST(Percentile, NearestRank) {
  EXPECT_EQ(nearest_rank_percentile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 70), 7);
  EXPECT_EQ(nearest_rank_percentile({5}, 70), 5);
  EXPECT_EQ(nearest_rank_percentile({3, 1, 2}, 50), 2);
  EXPECT_THROW(nearest_rank_percentile({}, 50), Error);
}

TEST(Percentile, FilterOneToTen) {
  std::map<std::string, int> lc;
  for (int i = 1; i <= 10; ++i) lc["p" + std::to_string(i)] = i;
  auto kept = percentile_filter(lc, 70);
  EXPECT_EQ(kept, (std::set<std::string>{"p7", "p8", "p9", "p10"}));
}

TEST(Percentile, TiesSaturate) {
  std::map<std::string, int> lc{{"a", 3}, {"b", 3}, {"c", 3}};
  EXPECT_EQ(percentile_filter(lc, 70).size(), 3u);
  try {
    percentile_filter({}, 70);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Cocitation, DirectCounts) {
  auto g = graph({"A", "B", "X", "Y", "Z"}, {{"X", "A"}, {"X", "B"}, {"Y", "A"}, {"Y", "B"},
                                            {"Z", "X"}});
  auto c = cocitation_matrix(g, {"A", "B", "Z"});
  EXPECT_EQ(c(0, 1), 2);
  EXPECT_EQ(c(1, 0), 2);
  EXPECT_EQ(c(0, 0), 2);
  EXPECT_EQ(c(1, 1), 2);
  EXPECT_EQ(c(0, 2), 0);
  auto s = normalized_similarity(c);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(s(2, 2), 0.0);
}

TEST(Cocitation, MatchesMatrixProduct) {
  std::mt19937_64 rng(25);
  auto g = random_graph(rng, 25, 0.2);
  std::vector<std::vector<long long>> adj(25, std::vector<long long>(25, 0));
  for (const auto& e : g.edges) adj[std::stoi(e.citer.substr(1))][std::stoi(e.cited.substr(1))] = 1;
  std::vector<std::string> scope;
  std::vector<int> cols;
  for (int j = 0; j < 25; j += 2) {
    scope.push_back("n" + std::to_string(j));
    cols.push_back(j);
  }
  auto c = cocitation_matrix(g, scope);
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      long long dot = 0;
      for (int k = 0; k < 25; ++k) dot += adj[k][cols[a]] * adj[k][cols[b]];
      EXPECT_EQ(c(a, b), dot);
    }
  }
}

TEST(Similarity, SymmetricInUnitInterval) {
  std::mt19937_64 rng(8);
  auto g = random_graph(rng, 20, 0.3);
  auto s = normalized_similarity(cocitation_matrix(g, g.nodes));
  auto c = cocitation_matrix(g, g.nodes);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      EXPECT_DOUBLE_EQ(s(i, j), s(j, i));
      EXPECT_GE(s(i, j), 0.0);
      EXPECT_LE(s(i, j), 1.0);
      if (c(i, i) > 0 && c(j, j) > 0 && i != j) {
        EXPECT_DOUBLE_EQ(s(i, j), c(i, j) / std::sqrt(double(c(i, i)) * double(c(j, j))));
      }
    }
  }
}

SimilarityMatrix two_groups() {
  SimilarityMatrix s(12, 0.0);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      if (i == j) {
        s(i, j) = 1.0;
      } else if ((i < 6) == (j < 6)) {
        s(i, j) = 0.9;
      }
    }
  }
  return s;
}

TEST(Dbscan, AllZeroIsNoise) {
  SimilarityMatrix s(5, 0.0);
  auto r = dbscan_cluster(s, 0.7, 2);
  EXPECT_EQ(r.cluster_count, 0);
  EXPECT_EQ(r.noise().size(), 5u);
}

TEST(Dbscan, TwoGroups) {
  auto r = dbscan_cluster(two_groups(), 0.7, 5);
  ASSERT_EQ(r.cluster_count, 2);
  EXPECT_EQ(r.clusters()[0], (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(r.clusters()[1], (std::vector<std::size_t>{6, 7, 8, 9, 10, 11}));
}

TEST(Dbscan, SimilarityModeReadsEpsilonAsFloor) {
  auto s = two_groups();
  EXPECT_EQ(dbscan_cluster(s, 0.3, 5, EpsMode::kSimilarity).cluster_count, 2);
  EXPECT_EQ(dbscan_cluster(s, 0.95, 5, EpsMode::kSimilarity).cluster_count, 0);
}

// Textbook reference: core points, components of the core graph numbered
// by their lowest index, borders to the lowest-numbered adjacent component.
std::vector<int> naive_dbscan(const SimilarityMatrix& s, double eps, int min_pts) {
  const std::size_t n = s.size();
  auto near = [&](std::size_t i, std::size_t j) { return i != j && 1.0 - s(i, j) <= eps; };
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = 1;
    for (std::size_t j = 0; j < n; ++j) cnt += near(i, j);
    core[i] = cnt >= min_pts;
  }
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || comp[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    comp[i] = next;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (core[v] && comp[v] < 0 && near(u, v)) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  std::vector<int> label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      label[i] = comp[i];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && near(i, j) && (label[i] < 0 || comp[j] < label[i])) label[i] = comp[j];
    }
  }
  return label;
}

TEST(Dbscan, MatchesNaiveReference) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 20, 0.25);
    auto s = normalized_similarity(cocitation_matrix(g, g.nodes));
    const double eps = 0.3 + 0.1 * (trial % 5);
    const int min_pts = 2 + trial % 4;
    EXPECT_EQ(dbscan_cluster(s, eps, min_pts).label, naive_dbscan(s, eps, min_pts));
  }
}

TEST(Centrality, SingletonAndUniform) {
  SimilarityMatrix s(3, 0.5);
  for (int i = 0; i < 3; ++i) s(i, i) = 1.0;
  EXPECT_EQ(centrality_degree({1}, s), std::vector<double>{1.0});
  EXPECT_EQ(centrality_degree({0, 1, 2}, s), (std::vector<double>{2.0, 2.0, 2.0}));
}

TEST(Centrality, RowSumsOfRestriction) {
  std::mt19937_64 rng(4);
  auto g = random_graph(rng, 15, 0.3);
  auto s = normalized_similarity(cocitation_matrix(g, g.nodes));
  std::vector<std::size_t> cluster{1, 4, 7, 9, 12};
  auto cd = centrality_degree(cluster, s);
  for (std::size_t a = 0; a < cluster.size(); ++a) {
    double sum = 0;
    for (auto b : cluster) sum += s(cluster[a], b);
    EXPECT_DOUBLE_EQ(cd[a], sum);
  }
}

TEST(SelectTop, SaturationAndArgmax) {
  std::vector<std::vector<ClusterMember>> clusters{
      {{"a", 2.0, 1}, {"b", 3.0, 1}, {"c", 1.0, 5}}, {{"d", 1.0, 0}}};
  EXPECT_EQ(select_top_per_cluster(clusters, {10, 10}),
            (std::set<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(select_top_per_cluster({clusters[0]}, {1}), (std::set<std::string>{"b"}));
}

TEST(SelectTop, MatchesSortAndSlice) {
  std::mt19937_64 rng(12);
  std::vector<std::vector<ClusterMember>> clusters(4);
  std::vector<int> m{1, 2, 3, 4};
  for (auto& c : clusters) {
    for (int i = 0; i < 8; ++i) {
      c.push_back({"id" + std::to_string(rng() % 1000), double(rng() % 4), int(rng() % 3)});
    }
  }
  std::set<std::string> oracle;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    auto c = clusters[k];
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        auto key = [](const ClusterMember& x) { return std::make_tuple(-x.centrality, -x.lc, x.id); };
        if (key(c[j]) < key(c[i])) std::swap(c[i], c[j]);
      }
    }
    for (int i = 0; i < m[k]; ++i) oracle.insert(c[i].id);
  }
  EXPECT_EQ(select_top_per_cluster(clusters, m), oracle);
}

TEST(Refine, EdgelessGraph) {
  auto r = refine(graph({"A", "B", "C"}, {}), {});
  EXPECT_EQ(r.lc_threshold, 0);
  EXPECT_EQ(r.v_prime.size(), 3u);
  EXPECT_EQ(r.noise.size(), 3u);
  EXPECT_TRUE(r.v_double_prime.empty());
}

TEST(Refine, TwoBlobsThroughCitationGraph) {
  // Blob members are cited together by a dedicated pool of citers.
  CitationGraph g;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 6; ++i) g.nodes.push_back("b" + std::to_string(b) + "m" + std::to_string(i));
    for (int k = 0; k < 4; ++k) {
      const std::string citer = "b" + std::to_string(b) + "c" + std::to_string(k);
      g.nodes.push_back(citer);
      for (int i = 0; i < 6; ++i) g.edges.push_back({citer, "b" + std::to_string(b) + "m" + std::to_string(i)});
    }
  }
  RefineConfig cfg;
  cfg.percentile = 50;
  cfg.m_k = 3;
  auto r = refine(g, cfg);
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters[0].size(), 6u);
  EXPECT_EQ(r.v_double_prime,
            (std::set<std::string>{"b0m0", "b0m1", "b0m2", "b1m0", "b1m1", "b1m2"}));
}

TEST(Refine, FixtureGraph) {
  auto g = citation_graph_from_jsonl_lines(read_jsonl(testing::fixture("graph.jsonl")));
  auto r = refine(g, {});
  EXPECT_EQ(g.nodes.size(), 80u);
  EXPECT_EQ(r.lc_threshold, 2);
  EXPECT_EQ(r.v_prime.size(), 31u);
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters[0].size(), 10u);
  EXPECT_EQ(r.clusters[1].size(), 10u);
  EXPECT_EQ(r.noise.size(), 11u);
  EXPECT_EQ(r.v_double_prime.size(), 20u);
  for (const auto& id : r.v_double_prime) EXPECT_TRUE(r.v_prime.count(id));
}

TEST(Refine, TargetSizeSearchesMk) {
  auto g = citation_graph_from_jsonl_lines(read_jsonl(testing::fixture("graph.jsonl")));
  RefineConfig cfg;
  cfg.target_size = 12;
  auto r = refine(g, cfg);
  EXPECT_EQ(r.m_k, (std::vector<int>{6, 6}));
  EXPECT_EQ(r.v_double_prime.size(), 12u);
}

TEST(Refine, ConfigValidation) {
  RefineConfig cfg;
  cfg.percentile = 100;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.min_pts = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_THROW(parse_eps_mode("radius"), Error);
}

}  // namespace
}  // namespace curator::litref
