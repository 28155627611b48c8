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
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"
#include "curator/gateway/agent.hpp"

namespace curator::rlhf {

// Three adjacent pairs per set: (Expert, WriteLikeHuman),
// (WriteLikeHuman, StrongModel), (StrongModel, WeakModel), pair_rank 1..3.
// Throws Error(kMalformedSet) if a set lacks a tier.
std::vector<PreferencePair> build_preference_pairs(const std::vector<RankedAnswerSet>& sets);

// Reward model r(question, answer). Implementations must be deterministic
// and safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const std::string& question, const std::string& answer) const = 0;
};

using FeatureFn = std::function<std::vector<double>(const std::string&, const std::string&)>;

// r(q, a) = w . phi(q, a).
class LinearFeatureScorer final : public Scorer {
 public:
  LinearFeatureScorer(FeatureFn features, std::vector<double> weights);

  // Signed feature hashing of lowercase answer unigrams, scaled by
  // 1/sqrt(token count), plus a question/answer word-overlap feature in the
  // last slot. dim >= 2.
  static LinearFeatureScorer hashed(std::size_t dim, std::vector<double> weights,
                                    std::uint64_t seed = 0);

  double score(const std::string& question, const std::string& answer) const override;
  std::vector<double> features(const std::string& question, const std::string& answer) const;

  const std::vector<double>& weights() const { return weights_; }
  void set_weights(std::vector<double> w);
  std::size_t dim() const { return weights_.size(); }

 private:
  FeatureFn features_;
  std::vector<double> weights_;
};

// Scores through a judge handle with its "e_score" template. Throws
// Error(kAgent) when the judge fails twice.
class JudgeScorer final : public Scorer {
 public:
  explicit JudgeScorer(gateway::AgentHandle judge, std::string template_name = "e_score");
  double score(const std::string& question, const std::string& answer) const override;

 private:
  gateway::AgentHandle judge_;
  std::string template_name_;
};

// -log(sigmoid(m)) without overflow for large |m|.
double neg_log_sigmoid(double margin);
double sigmoid(double x);

// Mean of -log sigmoid(m) over margins, summed in input order.
double pairwise_loss_from_margins(const std::vector<double>& margins);

// L = -(1/|D|) sum log sigmoid(r(q, chosen) - r(q, rejected)).
// Throws Error(kEmptyBatch) on an empty batch.
double rm_pairwise_loss(const std::vector<PreferencePair>& pairs, const Scorer& scorer);

// dL/dw for the linear scorer: -(1/N) sum (1 - sigmoid(m)) (phi+ - phi-).
std::vector<double> rm_loss_gradient(const std::vector<PreferencePair>& pairs,
                                     const LinearFeatureScorer& scorer);

// Indices of `scores` sorted descending; equal scores keep index order.
std::vector<std::size_t> ranking_order(const std::vector<double>& scores);

// Scores every candidate and sorts descending; ties keep the original order.
CandidateAnswerSet rank_candidates(const CandidateAnswerSet& set, const Scorer& scorer);
std::vector<CandidateAnswerSet> rank_all(const std::vector<CandidateAnswerSet>& sets,
                                         const Scorer& scorer);

struct GoldRow {
  std::string question_id;
  std::string question;
  std::string answer;
  double score = 0.0;
  int rank = 1;

  bool operator==(const GoldRow&) const = default;
};

nlohmann::json to_json(const GoldRow& row);

// Top-k of each ranked set. Throws Error(kInvalidK) unless 1 <= k <= the
// candidate count of every set, Error(kValidation) if a set is unscored.
std::vector<GoldRow> select_gold(const std::vector<CandidateAnswerSet>& ranked, int k);

// Answer-tier generation through the gateway.
struct TierAgents {
  gateway::AgentHandle expert;
  gateway::AgentHandle write_like_human;
  gateway::AgentHandle strong;
  gateway::AgentHandle weak;
};

struct Question {
  std::string id;
  std::string text;
  std::string subdomain;
};

// Throws Error(kAgent) if any tier cannot be produced.
std::vector<RankedAnswerSet> generate_ranked_sets(const std::vector<Question>& questions,
                                                  const TierAgents& agents, int max_in_flight);

}  // namespace curator::rlhf
