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

#include "curator/distiller/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "curator/core/error.hpp"
#include "curator/core/parallel.hpp"
#include "curator/core/random.hpp"

namespace curator::distiller {

namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::pair<int, double> nearest(const Point& p, const std::vector<Point>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d};
}

std::vector<Point> seed_plus_plus(const std::vector<Point>& points, int k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centroids;
  std::vector<bool> chosen(n, false);
  std::size_t first = uniform_index(rng, n);
  centroids.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], centroids[0]);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double r = uniform_unit(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] == 0.0) continue;
        pick = i;
        r -= d2[i];
        if (r < 0.0) break;
      }
    }
    if (pick == n) {
      // Remaining points coincide with chosen centroids; take any unchosen one.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      pick = rest[uniform_index(rng, rest.size())];
    }
    chosen[pick] = true;
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points[i], points[pick]));
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_cluster(std::span<const EmbeddingVector> vectors, int k, std::uint64_t seed,
                            int max_iterations) {
  const std::size_t n = vectors.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kInvalidK,
                "k=" + std::to_string(k) + " with " + std::to_string(n) + " vectors");
  }
  const std::size_t dim = vectors[0].values.size();
  std::vector<Point> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(vectors[i].values.size() == dim, "embedding dimensions differ",
            ErrorCode::kShapeMismatch);
    points[i] = vectors[i].values;
    if (vectors[i].norm > 0.0) {
      for (auto& x : points[i]) x /= vectors[i].norm;
    }
  }

  KMeansResult result;
  if (static_cast<std::size_t>(k) == n) {
    result.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.assignment[i] = static_cast<int>(i);
    result.centroids = points;
    return result;
  }

  Rng rng(mix64(seed));
  result.centroids = seed_plus_plus(points, k, rng);
  result.assignment.assign(n, -1);
  std::vector<double> dist(n, 0.0);

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<int> next(n);
    parallel_for(n, [&](std::size_t i) {
      auto [c, d] = nearest(points[i], result.centroids);
      next[i] = c;
      dist[i] = d;
    });

    // Refill empty clusters with the farthest point of a cluster that can
    // spare one.
    std::vector<int> sizes(k, 0);
    for (int c : next) ++sizes[c];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[next[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      if (far == n) break;
      --sizes[next[far]];
      next[far] = c;
      ++sizes[c];
      dist[far] = 0.0;
      result.centroids[c] = points[far];
    }

    result.iterations = iter + 1;
    const bool stable = next == result.assignment;
    result.assignment = std::move(next);
    if (stable) break;

    std::vector<Point> sums(k, Point(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] /= sizes[c];
      result.centroids[c] = std::move(sums[c]);
    }
  }
  return result;
}

}  // namespace curator::distiller
