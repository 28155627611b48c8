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

#include "curator/core/types.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "curator/core/error.hpp"

namespace curator {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kMalformedSet: return "MalformedSet";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kUsage: return "UsageError";
    case ErrorCode::kTemplate: return "TemplateError";
    case ErrorCode::kAgent: return "AgentFailure";
    case ErrorCode::kScoringFailed: return "ScoringFailed";
    case ErrorCode::kOptimizationFailed: return "OptimizationFailed";
  }
  return "Error";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw Error(ErrorCode::kValidation,
              "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Source, std::string_view>, 6> kSourceNames = {{
    {Source::kOAP, "OAP"},
    {Source::kOAJP, "OAJP"},
    {Source::kSP, "SP"},
    {Source::kDMT_AC, "DMT_AC"},
    {Source::kIEAD, "IEAD"},
    {Source::kSynthetic, "synthetic"},
}};

constexpr std::array<std::pair<Task, std::string_view>, 11> kTaskNames = {{
    {Task::kFV, "FV"},
    {Task::kRes, "Res"},
    {Task::kNER, "NER"},
    {Task::kSum, "Sum"},
    {Task::kWS, "WS"},
    {Task::kQA, "QA"},
    {Task::kTC, "TC"},
    {Task::kExp, "Exp"},
    {Task::kESM, "ESM"},
    {Task::kSC, "SC"},
    {Task::kMC, "MC"},
}};

constexpr std::array<std::pair<Provenance, std::string_view>, 3> kProvenanceNames = {{
    {Provenance::kSeed, "seed"},
    {Provenance::kAgentGenerated, "agent_generated"},
    {Provenance::kOptimized, "optimized"},
}};

constexpr std::array<std::pair<AnswerTier, std::string_view>, 4> kTierNames = {{
    {AnswerTier::kExpert, "Expert"},
    {AnswerTier::kWriteLikeHuman, "WriteLikeHuman"},
    {AnswerTier::kStrongModel, "StrongModel"},
    {AnswerTier::kWeakModel, "WeakModel"},
}};

constexpr std::array<std::pair<BenchKind, std::string_view>, 6> kBenchKindNames = {{
    {BenchKind::kSingleChoice, "SingleChoice"},
    {BenchKind::kMultipleChoice, "MultipleChoice"},
    {BenchKind::kFactCheck, "FactCheck"},
    {BenchKind::kQA, "QA"},
    {BenchKind::kExplanation, "Explanation"},
    {BenchKind::kESM, "ESM"},
}};

constexpr std::array<std::pair<QualityDimension, std::string_view>, 4> kDimensionNames = {{
    {QualityDimension::kAccuracy, "accuracy"},
    {QualityDimension::kCompleteness, "completeness"},
    {QualityDimension::kRelevance, "relevance"},
    {QualityDimension::kUsefulness, "usefulness"},
}};

}  // namespace

const std::vector<std::string>& canonical_subdomains() {
  static const std::vector<std::string> kNames = {
      "clean energy",
      "cogeneration",
      "combined cooling heating and power",
      "distributed energy",
      "energy hub",
      "energy management system",
      "energy optimization",
      "energy storage",
      "energy transition",
      "integrated energy",
      "load forecasting",
      "smart energy",
      "smart grid",
      "virtual power plant",
  };
  return kNames;
}

std::string_view to_string(Source v) { return name_of(v, kSourceNames); }
std::string_view to_string(Task v) { return name_of(v, kTaskNames); }
std::string_view to_string(Provenance v) { return name_of(v, kProvenanceNames); }
std::string_view to_string(AnswerTier v) { return name_of(v, kTierNames); }
std::string_view to_string(BenchKind v) { return name_of(v, kBenchKindNames); }
std::string_view to_string(QualityDimension v) { return name_of(v, kDimensionNames); }

Source parse_source(std::string_view s) { return parse_enum(s, kSourceNames, "source"); }
Task parse_task(std::string_view s) { return parse_enum(s, kTaskNames, "task"); }
Provenance parse_provenance(std::string_view s) {
  return parse_enum(s, kProvenanceNames, "provenance");
}
AnswerTier parse_tier(std::string_view s) { return parse_enum(s, kTierNames, "tier"); }
BenchKind parse_bench_kind(std::string_view s) {
  return parse_enum(s, kBenchKindNames, "bench kind");
}
QualityDimension parse_dimension(std::string_view s) {
  return parse_enum(s, kDimensionNames, "quality dimension");
}

bool is_choice_kind(BenchKind kind) {
  return kind == BenchKind::kSingleChoice || kind == BenchKind::kMultipleChoice;
}

bool is_objective_kind(BenchKind kind) {
  return is_choice_kind(kind) || kind == BenchKind::kFactCheck;
}

Corpus recompute_stats(Corpus corpus) {
  CorpusStats stats;
  for (const auto& doc : corpus.documents) {
    auto& s = stats.by_source[doc.source];
    s.documents += 1;
    s.tokens += doc.token_count;
    stats.documents += 1;
    stats.tokens += doc.token_count;
  }
  corpus.stats = std::move(stats);
  return corpus;
}

void validate(const Document& doc) {
  require(!doc.id.empty(), "document id is empty");
  require(doc.text.find("data:image/") == std::string::npos,
          "document '" + doc.id + "' contains a raw image payload");
}

void validate(const Corpus& corpus) {
  std::set<std::string_view> seen;
  for (const auto& doc : corpus.documents) {
    validate(doc);
    require(seen.insert(doc.id).second, "duplicate document id '" + doc.id + "'");
  }
}

void validate(const CitationGraph& graph) {
  std::set<std::string_view> nodes;
  for (const auto& n : graph.nodes) {
    require(!n.empty(), "empty node id");
    require(nodes.insert(n).second, "duplicate node '" + n + "'");
  }
  std::set<std::pair<std::string_view, std::string_view>> edges;
  for (const auto& e : graph.edges) {
    require(e.citer != e.cited, "self edge on '" + e.citer + "'");
    require(nodes.count(e.citer) && nodes.count(e.cited),
            "edge " + e.citer + " -> " + e.cited + " has an unknown endpoint");
    require(edges.emplace(e.citer, e.cited).second,
            "duplicate edge " + e.citer + " -> " + e.cited);
  }
}

void validate(const InstructionSample& sample) {
  require(!sample.instruction.empty(), "instruction is empty");
  require(!sample.output.empty(), "output is empty");
}

QualityReport::QualityReport(Scores scores, Reasons reasons, int round)
    : scores_(std::move(scores)), reasons_(std::move(reasons)), round_(round) {
  require(round_ >= 1, "quality report round must be >= 1");
  require(scores_.size() == kAllDimensions.size(),
          "quality report needs exactly four dimensions");
  for (auto d : kAllDimensions) {
    auto it = scores_.find(d);
    require(it != scores_.end(),
            "missing dimension '" + std::string(to_string(d)) + "'");
    require(it->second >= 0.0 && it->second <= 10.0,
            "score for '" + std::string(to_string(d)) + "' outside [0,10]");
  }
}

double QualityReport::mean() const {
  double sum = 0.0;
  for (auto d : kAllDimensions) sum += scores_.at(d);
  return sum / static_cast<double>(kAllDimensions.size());
}

void validate(const RankedAnswerSet& set) {
  require(set.tiered_answers.size() == kTierOrder.size(),
          "ranked set '" + set.question_id + "' must have exactly 4 answers",
          ErrorCode::kMalformedSet);
  for (std::size_t i = 0; i < kTierOrder.size(); ++i) {
    require(set.tiered_answers[i].tier == kTierOrder[i],
            "ranked set '" + set.question_id + "' tier " + std::to_string(i) +
                " should be " + std::string(to_string(kTierOrder[i])),
            ErrorCode::kMalformedSet);
  }
}

void validate(const PreferencePair& pair) {
  require(pair.chosen != pair.rejected,
          "preference pair for '" + pair.question_id + "' has chosen == rejected");
  require(pair.pair_rank >= 1 && pair.pair_rank <= 3, "pair_rank must be 1..3");
}

void validate(const CandidateAnswerSet& set) {
  if (set.scores) {
    require(set.scores->size() == set.candidates.size(),
            "candidate set '" + set.question_id +
                "' has scores misaligned with candidates");
  }
}

void validate(const BenchItem& item) {
  require(!item.id.empty(), "bench item id is empty");
  std::set<std::string_view> labels;
  for (const auto& o : item.options) {
    require(labels.insert(o.label).second,
            "bench item '" + item.id + "' repeats option label '" + o.label + "'");
  }
  if (is_choice_kind(item.kind)) {
    require(item.options.size() >= 2,
            "bench item '" + item.id + "' needs at least two options");
    require(!item.gold.labels.empty(),
            "bench item '" + item.id + "' has no gold label");
    for (const auto& g : item.gold.labels) {
      require(labels.count(g) > 0,
              "bench item '" + item.id + "' gold label '" + g + "' is not an option");
    }
    if (item.kind == BenchKind::kSingleChoice) {
      require(item.gold.labels.size() == 1,
              "single-choice item '" + item.id + "' needs exactly one gold label");
    }
  } else if (item.kind == BenchKind::kFactCheck) {
    require(item.gold.labels.size() == 1 &&
                (item.gold.labels[0] == "true" || item.gold.labels[0] == "false"),
            "fact-check item '" + item.id + "' gold must be [\"true\"] or [\"false\"]");
  }
}

}  // namespace curator
