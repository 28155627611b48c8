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

#include "curator/rlhf/preference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "curator/core/error.hpp"
#include "curator/core/parallel.hpp"
#include "curator/core/random.hpp"

namespace curator::rlhf {

using nlohmann::json;

std::vector<PreferencePair> build_preference_pairs(const std::vector<RankedAnswerSet>& sets) {
  std::vector<PreferencePair> pairs;
  pairs.reserve(sets.size() * 3);
  for (const auto& set : sets) {
    std::array<const std::string*, 4> by_tier{};
    for (const auto& a : set.tiered_answers) {
      const auto idx = static_cast<std::size_t>(
          std::find(kTierOrder.begin(), kTierOrder.end(), a.tier) - kTierOrder.begin());
      require(by_tier[idx] == nullptr,
              "ranked set '" + set.question_id + "' repeats tier " + std::string(to_string(a.tier)),
              ErrorCode::kMalformedSet);
      by_tier[idx] = &a.text;
    }
    for (std::size_t t = 0; t < by_tier.size(); ++t) {
      require(by_tier[t] != nullptr,
              "ranked set '" + set.question_id + "' is missing tier " +
                  std::string(to_string(kTierOrder[t])),
              ErrorCode::kMalformedSet);
    }
    for (int r = 0; r < 3; ++r) {
      pairs.push_back({set.question_id, set.question, *by_tier[r], *by_tier[r + 1], r + 1});
    }
  }
  return pairs;
}

LinearFeatureScorer::LinearFeatureScorer(FeatureFn features, std::vector<double> weights)
    : features_(std::move(features)), weights_(std::move(weights)) {
  require(static_cast<bool>(features_), "linear scorer needs a feature function",
          ErrorCode::kInvalidArgument);
}

namespace {

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

LinearFeatureScorer LinearFeatureScorer::hashed(std::size_t dim, std::vector<double> weights,
                                                std::uint64_t seed) {
  require(dim >= 2, "hashed scorer needs dim >= 2", ErrorCode::kInvalidArgument);
  require(weights.size() == dim, "weight count must equal dim", ErrorCode::kShapeMismatch);
  FeatureFn fn = [dim, seed](const std::string& q, const std::string& a) {
    std::vector<double> phi(dim, 0.0);
    const auto aw = words(a);
    if (aw.empty()) return phi;
    const double scale = 1.0 / std::sqrt(static_cast<double>(aw.size()));
    for (const auto& w : aw) {
      const std::uint64_t h = mix64(fnv1a64(w) ^ seed);
      const double sign = (h >> 63) ? -1.0 : 1.0;
      phi[h % (dim - 1)] += sign * scale;
    }
    const auto qw = words(q);
    std::set<std::string> qs(qw.begin(), qw.end());
    std::size_t overlap = 0;
    for (const auto& w : std::set<std::string>(aw.begin(), aw.end())) overlap += qs.count(w);
    phi[dim - 1] = qs.empty() ? 0.0 : static_cast<double>(overlap) / static_cast<double>(qs.size());
    return phi;
  };
  return LinearFeatureScorer(std::move(fn), std::move(weights));
}

std::vector<double> LinearFeatureScorer::features(const std::string& question,
                                                  const std::string& answer) const {
  auto phi = features_(question, answer);
  require(phi.size() == weights_.size(), "feature length does not match weights",
          ErrorCode::kShapeMismatch);
  return phi;
}

double LinearFeatureScorer::score(const std::string& question, const std::string& answer) const {
  const auto phi = features(question, answer);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += weights_[i] * phi[i];
  return s;
}

void LinearFeatureScorer::set_weights(std::vector<double> w) {
  require(w.size() == weights_.size(), "weight count changed", ErrorCode::kShapeMismatch);
  weights_ = std::move(w);
}

JudgeScorer::JudgeScorer(gateway::AgentHandle judge, std::string template_name)
    : judge_(std::move(judge)), template_name_(std::move(template_name)) {}

double JudgeScorer::score(const std::string& question, const std::string& answer) const {
  const gateway::SlotMap slots = {{"question", question}, {"answer", answer}};
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto r = gateway::dispatch(judge_, slots, template_name_);
    if (!r.ok) {
      last_error = r.error;
      continue;
    }
    if (auto s = gateway::parse_score_reply(r.text)) return *s;
    last_error = "unparseable judge reply";
  }
  throw Error(ErrorCode::kAgent, "judge scoring failed: " + last_error);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double neg_log_sigmoid(double m) {
  return m >= 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double pairwise_loss_from_margins(const std::vector<double>& margins) {
  if (margins.empty()) throw Error(ErrorCode::kEmptyBatch, "no preference pairs");
  double sum = 0.0;
  for (double m : margins) sum += neg_log_sigmoid(m);
  return sum / static_cast<double>(margins.size());
}

namespace {

std::vector<double> margins_of(const std::vector<PreferencePair>& pairs, const Scorer& scorer) {
  std::vector<double> margins(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& p = pairs[i];
    margins[i] = scorer.score(p.prompt, p.chosen) - scorer.score(p.prompt, p.rejected);
  });
  return margins;
}

}  // namespace

double rm_pairwise_loss(const std::vector<PreferencePair>& pairs, const Scorer& scorer) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "no preference pairs");
  return pairwise_loss_from_margins(margins_of(pairs, scorer));
}

std::vector<double> rm_loss_gradient(const std::vector<PreferencePair>& pairs,
                                     const LinearFeatureScorer& scorer) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "no preference pairs");
  std::vector<double> grad(scorer.dim(), 0.0);
  const double n = static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    const auto pos = scorer.features(p.prompt, p.chosen);
    const auto neg = scorer.features(p.prompt, p.rejected);
    double m = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) m += scorer.weights()[i] * (pos[i] - neg[i]);
    const double coef = -(1.0 - sigmoid(m)) / n;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += coef * (pos[i] - neg[i]);
  }
  return grad;
}

std::vector<std::size_t> ranking_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

CandidateAnswerSet rank_candidates(const CandidateAnswerSet& set, const Scorer& scorer) {
  std::vector<double> scores(set.candidates.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = scorer.score(set.question, set.candidates[i]);
  }
  CandidateAnswerSet out;
  out.question_id = set.question_id;
  out.question = set.question;
  out.scores.emplace();
  for (std::size_t i : ranking_order(scores)) {
    out.candidates.push_back(set.candidates[i]);
    out.scores->push_back(scores[i]);
  }
  return out;
}

std::vector<CandidateAnswerSet> rank_all(const std::vector<CandidateAnswerSet>& sets,
                                         const Scorer& scorer) {
  std::vector<CandidateAnswerSet> out(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) { out[i] = rank_candidates(sets[i], scorer); });
  return out;
}

json to_json(const GoldRow& row) {
  return {{"question_id", row.question_id}, {"question", row.question}, {"answer", row.answer},
          {"score", row.score},             {"rank", row.rank}};
}

std::vector<GoldRow> select_gold(const std::vector<CandidateAnswerSet>& ranked, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidK, "k must be >= 1");
  std::vector<GoldRow> rows;
  for (const auto& set : ranked) {
    validate(set);
    require(set.scores.has_value(), "candidate set '" + set.question_id + "' is not ranked");
    if (static_cast<std::size_t>(k) > set.candidates.size()) {
      throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) + " exceeds the " +
                                            std::to_string(set.candidates.size()) +
                                            " candidates of '" + set.question_id + "'");
    }
    for (std::size_t i = 1; i < set.scores->size(); ++i) {
      require((*set.scores)[i - 1] >= (*set.scores)[i],
              "candidate set '" + set.question_id + "' is not sorted by score");
    }
    for (int r = 0; r < k; ++r) {
      rows.push_back({set.question_id, set.question, set.candidates[r], (*set.scores)[r], r + 1});
    }
  }
  return rows;
}

std::vector<RankedAnswerSet> generate_ranked_sets(const std::vector<Question>& questions,
                                                  const TierAgents& agents, int max_in_flight) {
  require(max_in_flight >= 1, "max_in_flight must be >= 1", ErrorCode::kInvalidArgument);
  std::vector<RankedAnswerSet> out(questions.size());
  auto ask = [](const gateway::AgentHandle& h, const gateway::SlotMap& slots,
                const std::string& qid) {
    auto r = gateway::dispatch(h, slots);
    if (!r.ok) {
      throw Error(ErrorCode::kAgent, "question '" + qid + "' " +
                                         std::string(gateway::to_string(h.role)) + ": " + r.error);
    }
    return r.text;
  };
  parallel_for(
      questions.size(),
      [&](std::size_t i) {
        const auto& q = questions[i];
        const gateway::SlotMap base = {{"question", q.text}, {"subdomain", q.subdomain}};
        std::string expert = ask(agents.expert, base, q.id);
        gateway::SlotMap wlh = base;
        wlh["reference"] = expert;
        std::string human = ask(agents.write_like_human, wlh, q.id);
        std::string strong = ask(agents.strong, base, q.id);
        std::string weak = ask(agents.weak, base, q.id);
        out[i] = {q.id,
                  q.text,
                  {{AnswerTier::kExpert, std::move(expert)},
                   {AnswerTier::kWriteLikeHuman, std::move(human)},
                   {AnswerTier::kStrongModel, std::move(strong)},
                   {AnswerTier::kWeakModel, std::move(weak)}}};
      },
      static_cast<std::size_t>(max_in_flight));
  return out;
}

}  // namespace curator::rlhf
