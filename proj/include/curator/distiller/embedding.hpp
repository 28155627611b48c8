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
#include <optional>
#include <string>
#include <vector>

#include "curator/core/types.hpp"
#include "curator/gateway/embeddings.hpp"

namespace curator::distiller {

struct EmbeddingVector {
  std::string doc_id;
  std::vector<double> values;
  double norm = 0.0;

  // Computes the cached norm.
  static EmbeddingVector make(std::string doc_id, std::vector<double> values);

  bool operator==(const EmbeddingVector&) const = default;
};

double euclidean_norm(const std::vector<double>& v);

// 1 - cosine similarity, clamped to [0, 2]. Zero vectors are at distance 1
// from everything except another zero vector (distance 0).
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

// Deterministic offline provider: signed feature hashing of lowercased word
// unigrams and bigrams, seeded. Identical texts map to identical vectors.
class FeatureHashProvider final : public EmbeddingProvider {
 public:
  explicit FeatureHashProvider(std::size_t dimension = 512, std::uint64_t seed = 0);
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::vector<double> embed_one(const std::string& text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Provider backed by the gateway's embeddings client.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(gateway::EmbeddingEndpoint endpoint, std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  gateway::EmbeddingEndpoint endpoint_;
  std::size_t dimension_;
};

struct EmbedOptions {
  std::size_t batch_size = 64;
  // Completed vectors are written here if the provider fails, and reused on
  // the next run.
  std::optional<std::filesystem::path> checkpoint;
};

// One vector per document, in corpus order. A provider failure writes the
// checkpoint (when configured) and rethrows.
std::vector<EmbeddingVector> embed_corpus(const Corpus& corpus, EmbeddingProvider& provider,
                                          const EmbedOptions& options = {});

}  // namespace curator::distiller
