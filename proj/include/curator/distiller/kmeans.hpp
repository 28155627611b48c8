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
#include <span>
#include <vector>

#include "curator/distiller/embedding.hpp"

namespace curator::distiller {

struct KMeansResult {
  std::vector<int> assignment;  // cluster index per input vector
  std::vector<std::vector<double>> centroids;
  int iterations = 0;
};

// Lloyd's algorithm on L2-normalized vectors with k-means++ seeding.
// Stops when assignments are stable or after `max_iterations`. Empty
// clusters are refilled with the point farthest from its centroid, so every
// cluster is nonempty. Throws Error(kInvalidK) unless 1 <= k <= n.
KMeansResult kmeans_cluster(std::span<const EmbeddingVector> vectors, int k, std::uint64_t seed,
                            int max_iterations = 100);

}  // namespace curator::distiller
