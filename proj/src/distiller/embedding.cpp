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

#include "curator/distiller/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/log.hpp"
#include "curator/core/random.hpp"

namespace curator::distiller {

double euclidean_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::make(std::string doc_id, std::vector<double> values) {
  EmbeddingVector e;
  e.doc_id = std::move(doc_id);
  e.norm = euclidean_norm(values);
  e.values = std::move(values);
  return e;
}

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  require(a.values.size() == b.values.size(), "embedding dimensions differ",
          ErrorCode::kShapeMismatch);
  if (a.norm == 0.0 || b.norm == 0.0) return (a.norm == 0.0 && b.norm == 0.0) ? 0.0 : 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  double d = 1.0 - dot / (a.norm * b.norm);
  return std::clamp(d, 0.0, 2.0);
}

FeatureHashProvider::FeatureHashProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  require(dimension_ >= 1, "embedding dimension must be >= 1", ErrorCode::kInvalidArgument);
}

std::vector<double> FeatureHashProvider::embed_one(const std::string& text) const {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));

  std::vector<double> v(dimension_, 0.0);
  auto add = [&](const std::string& feature, double weight) {
    std::uint64_t h = mix64(fnv1a64(feature, 0xcbf29ce484222325ULL ^ mix64(seed_)));
    double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dimension_] += sign * weight;
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    add(words[i], 1.0);
    if (i + 1 < words.size()) add(words[i] + ' ' + words[i + 1], 0.5);
  }
  return v;
}

std::vector<std::vector<double>> FeatureHashProvider::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(gateway::EmbeddingEndpoint endpoint,
                                                 std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {}

std::vector<std::vector<double>> RemoteEmbeddingProvider::embed(const std::vector<std::string>& texts) {
  auto rows = gateway::embed_texts(endpoint_, texts);
  for (const auto& r : rows) {
    require(r.size() == dimension_,
            "provider returned dimension " + std::to_string(r.size()) + ", expected " +
                std::to_string(dimension_),
            ErrorCode::kAgent);
  }
  return rows;
}

namespace {

std::map<std::string, std::vector<double>> load_checkpoint(const std::filesystem::path& path) {
  std::map<std::string, std::vector<double>> out;
  if (!std::filesystem::exists(path)) return out;
  for (const auto& j : read_jsonl(path)) {
    out[j.at("doc_id").get<std::string>()] = j.at("values").get<std::vector<double>>();
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<EmbeddingVector>& done) {
  std::vector<Json> lines;
  for (const auto& e : done) {
    if (!e.doc_id.empty()) lines.push_back({{"doc_id", e.doc_id}, {"values", e.values}});
  }
  write_file_atomic(path, to_jsonl(lines));
}

}  // namespace

std::vector<EmbeddingVector> embed_corpus(const Corpus& corpus, EmbeddingProvider& provider,
                                          const EmbedOptions& options) {
  const auto& docs = corpus.documents;
  std::vector<EmbeddingVector> out(docs.size());
  std::vector<bool> have(docs.size(), false);
  if (options.checkpoint) {
    auto cached = load_checkpoint(*options.checkpoint);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      auto it = cached.find(docs[i].id);
      if (it != cached.end() && it->second.size() == provider.dimension()) {
        out[i] = EmbeddingVector::make(docs[i].id, it->second);
        have[i] = true;
      }
    }
  }
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!have[i]) todo.push_back(i);
  }
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  for (std::size_t start = 0; start < todo.size(); start += batch) {
    const std::size_t end = std::min(todo.size(), start + batch);
    std::vector<std::string> texts;
    for (std::size_t k = start; k < end; ++k) texts.push_back(docs[todo[k]].text);
    std::vector<std::vector<double>> rows;
    try {
      rows = provider.embed(texts);
      require(rows.size() == texts.size(), "provider returned wrong number of vectors",
              ErrorCode::kAgent);
    } catch (const Error&) {
      if (options.checkpoint) {
        save_checkpoint(*options.checkpoint, out);
        log::warn("embedding failed; checkpoint written to " + options.checkpoint->string());
      }
      throw;
    }
    for (std::size_t k = start; k < end; ++k) {
      auto& row = rows[k - start];
      require(row.size() == provider.dimension(), "provider dimension mismatch",
              ErrorCode::kShapeMismatch);
      out[todo[k]] = EmbeddingVector::make(docs[todo[k]].id, std::move(row));
    }
  }
  return out;
}

}  // namespace curator::distiller
