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

#include <cmath>
#include <random>
#include <set>

#include "curator/core/codec.hpp"
#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/distiller/dedup.hpp"
#include "curator/distiller/embedding.hpp"
#include "curator/distiller/kmeans.hpp"
#include "support.hpp"

namespace curator::distiller {
namespace {

EmbeddingVector vec(std::string id, std::vector<double> v) {
  return EmbeddingVector::make(std::move(id), std::move(v));
}

double oracle_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 && nb == 0) return 0.0;
  if (na == 0 || nb == 0) return 1.0;
  return std::clamp(1.0 - dot / std::sqrt(na * nb), 0.0, 2.0);
}

TEST(Embedding, FeatureHashIsDeterministic) {
  FeatureHashProvider p(64, 3);
  auto a = p.embed({"grid frequency control", "grid frequency control"});
  EXPECT_EQ(a[0], a[1]);
  EXPECT_EQ(p.embed_one("grid frequency control"), a[0]);
  EXPECT_EQ(cosine_distance(vec("a", a[0]), vec("b", a[1])), 0.0);
}

TEST(Embedding, EmptyCorpusGivesNoVectors) {
  FeatureHashProvider p(16);
  EXPECT_TRUE(embed_corpus({}, p).empty());
}

TEST(Embedding, CosineDistanceEdgeCases) {
  EXPECT_DOUBLE_EQ(cosine_distance(vec("a", {1, 0}), vec("b", {0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(vec("a", {1, 0}), vec("b", {-1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(cosine_distance(vec("a", {0, 0}), vec("b", {0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(cosine_distance(vec("a", {0, 0}), vec("b", {1, 0})), 1.0);
}

TEST(Embedding, CheckpointResumesAfterFailure) {
  struct Flaky : EmbeddingProvider {
    std::size_t dimension() const override { return 2; }
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
      if (fail_after-- == 0) throw Error(ErrorCode::kAgent, "provider down");
      std::vector<std::vector<double>> out;
      for (const auto& t : texts) out.push_back({static_cast<double>(t.size()), 1.0});
      calls += texts.size();
      return out;
    }
    int fail_after = 1;
    std::size_t calls = 0;
  };
  testing::TempDir dir;
  Corpus c;
  for (int i = 0; i < 5; ++i) {
    Document d;
    d.id = "d" + std::to_string(i);
    d.text = std::string(i + 1, 'x');
    c.documents.push_back(d);
  }
  EmbedOptions opts;
  opts.batch_size = 2;
  opts.checkpoint = dir / "ckpt.jsonl";
  Flaky p;
  EXPECT_THROW(embed_corpus(c, p, opts), Error);
  EXPECT_TRUE(std::filesystem::exists(*opts.checkpoint));
  Flaky resumed;
  resumed.fail_after = -1;
  auto v = embed_corpus(c, resumed, opts);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(resumed.calls, 3u);
  EXPECT_EQ(v[4].values[0], 5.0);
}

TEST(KMeans, InvalidK) {
  std::vector<EmbeddingVector> v{vec("a", {1, 0}), vec("b", {0, 1})};
  for (int k : {0, 3}) {
    try {
      kmeans_cluster(v, k, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidK);
    }
  }
}

TEST(KMeans, KEqualsNAndKOne) {
  std::vector<EmbeddingVector> v{vec("a", {1, 0}), vec("b", {0, 1}), vec("c", {1, 1})};
  auto all = kmeans_cluster(v, 3, 1);
  EXPECT_EQ(std::set<int>(all.assignment.begin(), all.assignment.end()).size(), 3u);
  auto one = kmeans_cluster(v, 1, 1);
  for (int a : one.assignment) EXPECT_EQ(a, 0);
}

TEST(KMeans, RecoversSeparatedBlobs) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<EmbeddingVector> v;
  std::vector<int> truth;
  for (int i = 0; i < 40; ++i) {
    const int blob = i % 2;
    std::vector<double> x(8, 0.0);
    x[blob == 0 ? 0 : 7] = 1.0;
    for (auto& c : x) c += noise(rng);
    v.push_back(vec("p" + std::to_string(i), x));
    truth.push_back(blob);
  }
  auto r = kmeans_cluster(v, 2, 7);
  // Same partition up to relabelling.
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      EXPECT_EQ(r.assignment[i] == r.assignment[j], truth[i] == truth[j]);
    }
  }
  // Every point sits with its nearest centroid.
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::vector<double> unit = v[i].values;
    for (auto& c : unit) c /= v[i].norm;
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t c = 0; c < r.centroids.size(); ++c) {
      double d = 0;
      for (std::size_t k = 0; k < unit.size(); ++k) {
        d += (unit[k] - r.centroids[c][k]) * (unit[k] - r.centroids[c][k]);
      }
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    EXPECT_EQ(static_cast<int>(best), r.assignment[i]);
  }
}

TEST(KMeans, SameSeedSameResult) {
  FeatureHashProvider p(32, 1);
  std::vector<EmbeddingVector> v;
  for (int i = 0; i < 30; ++i) {
    v.push_back(vec("d" + std::to_string(i), p.embed_one("doc number " + std::to_string(i % 7))));
  }
  auto a = kmeans_cluster(v, 4, 99);
  auto b = kmeans_cluster(v, 4, 99);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(EpsilonBall, IdenticalVectorsKeepOne) {
  std::vector<DedupMember> m{{vec("a", {1, 2}), 5}, {vec("b", {1, 2}), 5}};
  auto r = epsilon_ball_dedup(m, 0.05, KeepRule::kLowestId);
  EXPECT_EQ(r.kept, std::vector<std::string>{"a"});
  EXPECT_EQ(r.removed, std::vector<std::string>{"b"});
}

TEST(EpsilonBall, DistantVectorsAllKept) {
  std::vector<DedupMember> m{{vec("a", {1, 0, 0}), 1}, {vec("b", {0, 1, 0}), 1},
                             {vec("c", {0, 0, 1}), 1}};
  EXPECT_EQ(epsilon_ball_dedup(m, 0.05, KeepRule::kLongestText).kept.size(), 3u);
}

TEST(EpsilonBall, TightBallKeepsRuleMaximum) {
  std::vector<DedupMember> m;
  const std::vector<std::size_t> lengths{40, 90, 10, 60, 30};
  for (int i = 0; i < 5; ++i) {
    m.push_back({vec("v" + std::to_string(i), {1.0, 0.001 * i}), lengths[i]});
  }
  for (const auto& a : m) {
    for (const auto& b : m) ASSERT_LE(oracle_distance(a.vector.values, b.vector.values), 0.05);
  }
  auto r = epsilon_ball_dedup(m, 0.05, KeepRule::kLongestText);
  EXPECT_EQ(r.kept, std::vector<std::string>{"v1"});
  EXPECT_EQ(r.removed.size(), 4u);
  for (const auto& rm : r.removals) EXPECT_EQ(rm.kept_id, "v1");
}

Corpus corpus_of(const std::vector<std::string>& texts) {
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Document d;
    d.id = "doc-" + std::to_string(100 + i);
    d.text = texts[i];
    c.documents.push_back(d);
  }
  return recompute_stats(c);
}

TEST(Dedup, EmptyCorpusIsError) {
  FeatureHashProvider p;
  try {
    deduplicate({}, {}, p, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Dedup, DistinctCorpusUnchanged) {
  FeatureHashProvider p;
  auto c = corpus_of({"solar irradiance forecasting with satellite imagery",
                      "hydrogen electrolyser stack degradation",
                      "district heating network temperature control",
                      "nuclear fuel burnup measurement"});
  auto r = deduplicate(c, {}, p, 1);
  EXPECT_EQ(r.corpus.documents, c.documents);
  EXPECT_TRUE(r.removals.empty());
}

TEST(Dedup, ExactCopiesRemoved) {
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) {
    texts.push_back("original paragraph " + std::to_string(i) + " about topic " +
                    std::string(1, static_cast<char>('a' + i)) + " and load " +
                    std::to_string(i * 37));
  }
  auto with_copies = texts;
  with_copies.insert(with_copies.end(), texts.begin(), texts.end());
  FeatureHashProvider p;
  auto r = deduplicate(corpus_of(with_copies), {}, p, 1);
  EXPECT_EQ(r.corpus.documents.size(), 10u);
}

// All-pairs greedy oracle over the whole corpus, ignoring clustering.
std::set<std::string> all_pairs_oracle(const Corpus& c, EmbeddingProvider& p, double eps) {
  std::vector<std::string> texts;
  for (const auto& d : c.documents) texts.push_back(d.text);
  auto v = p.embed(texts);
  const std::size_t n = v.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = oracle_distance(v[i], v[j]);
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto la = c.documents[a].text.size();
    const auto lb = c.documents[b].text.size();
    if (la != lb) return la > lb;
    return c.documents[a].id < c.documents[b].id;
  });
  std::vector<std::size_t> kept;
  std::set<std::string> removed;
  for (std::size_t i : order) {
    bool dup = false;
    for (std::size_t k : kept) dup = dup || dist[i][k] <= eps;
    if (dup) {
      removed.insert(c.documents[i].id);
    } else {
      kept.push_back(i);
    }
  }
  return removed;
}

TEST(Dedup, PlantedParaphraseFixtureMatchesAllPairsOracle) {
  auto docs = read_jsonl_as<Document>(testing::fixture("dedup/corpus.jsonl"));
  ASSERT_EQ(docs.size(), 20u);
  Corpus c = recompute_stats(Corpus{docs, {}});
  FeatureHashProvider p(512, 42);
  DedupConfig cfg;
  auto r = deduplicate(c, cfg, p, 42);
  std::set<std::string> removed;
  for (const auto& rm : r.removals) removed.insert(rm.removed_id);
  EXPECT_EQ(removed.size(), 5u);
  EXPECT_EQ(removed, all_pairs_oracle(c, p, cfg.epsilon));
  EXPECT_EQ(r.corpus.documents.size(), 15u);
}

TEST(Dedup, AutoK) {
  EXPECT_EQ(auto_k(1), 1);
  EXPECT_EQ(auto_k(1000), 1);
  EXPECT_EQ(auto_k(1001), 2);
  EXPECT_EQ(auto_k(100000000), 5000);
}

TEST(Dedup, ConfigValidation) {
  DedupConfig cfg;
  cfg.epsilon = -0.1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.k_clusters = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace curator::distiller
