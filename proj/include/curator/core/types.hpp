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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curator {

// Corpus source categories (open-access papers, journal papers, standards,
// textbooks and similar domain material, industry/encyclopedic data).
enum class Source { kOAP, kOAJP, kSP, kDMT_AC, kIEAD, kSynthetic };

enum class Task { kFV, kRes, kNER, kSum, kWS, kQA, kTC, kExp, kESM, kSC, kMC };

enum class Provenance { kSeed, kAgentGenerated, kOptimized };

enum class AnswerTier { kExpert, kWriteLikeHuman, kStrongModel, kWeakModel };

enum class BenchKind {
  kSingleChoice,
  kMultipleChoice,
  kFactCheck,
  kQA,
  kExplanation,
  kESM,
};

enum class QualityDimension { kAccuracy, kCompleteness, kRelevance, kUsefulness };

inline constexpr std::array<Source, 6> kAllSources = {
    Source::kOAP,  Source::kOAJP, Source::kSP,
    Source::kDMT_AC, Source::kIEAD, Source::kSynthetic};

inline constexpr std::array<Task, 11> kAllTasks = {
    Task::kFV, Task::kRes, Task::kNER, Task::kSum, Task::kWS, Task::kQA,
    Task::kTC, Task::kExp, Task::kESM, Task::kSC, Task::kMC};

inline constexpr std::array<AnswerTier, 4> kTierOrder = {
    AnswerTier::kExpert, AnswerTier::kWriteLikeHuman, AnswerTier::kStrongModel,
    AnswerTier::kWeakModel};

inline constexpr std::array<QualityDimension, 4> kAllDimensions = {
    QualityDimension::kAccuracy, QualityDimension::kCompleteness,
    QualityDimension::kRelevance, QualityDimension::kUsefulness};

// Canonical sub-field names. Subdomain stays an open string set; this list is
// what ships, not what is accepted.
const std::vector<std::string>& canonical_subdomains();

std::string_view to_string(Source v);
std::string_view to_string(Task v);
std::string_view to_string(Provenance v);
std::string_view to_string(AnswerTier v);
std::string_view to_string(BenchKind v);
std::string_view to_string(QualityDimension v);

// Parsers throw Error(kValidation) on unknown names.
Source parse_source(std::string_view s);
Task parse_task(std::string_view s);
Provenance parse_provenance(std::string_view s);
AnswerTier parse_tier(std::string_view s);
BenchKind parse_bench_kind(std::string_view s);
QualityDimension parse_dimension(std::string_view s);

bool is_choice_kind(BenchKind kind);
bool is_objective_kind(BenchKind kind);

struct Document {
  std::string id;
  Source source = Source::kSynthetic;
  std::string subdomain;
  std::string text;
  std::uint64_t token_count = 0;
  std::map<std::string, std::string> meta;

  bool operator==(const Document&) const = default;
};

struct SourceStats {
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;

  bool operator==(const SourceStats&) const = default;
};

struct CorpusStats {
  std::map<Source, SourceStats> by_source;
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  CorpusStats stats;

  bool operator==(const Corpus&) const = default;
};

// Aggregates per-source document and token counts from the documents.
Corpus recompute_stats(Corpus corpus);

// Unique ids, no raw image payloads in text.
void validate(const Corpus& corpus);
void validate(const Document& doc);

struct CitationEdge {
  std::string citer;
  std::string cited;

  auto operator<=>(const CitationEdge&) const = default;
};

struct CitationGraph {
  std::vector<std::string> nodes;
  std::vector<CitationEdge> edges;

  bool operator==(const CitationGraph&) const = default;
};

// No self edges, no duplicate edges, no dangling endpoints, unique nodes.
void validate(const CitationGraph& graph);

struct InstructionSample {
  std::string id;
  std::string instruction;
  std::string input;
  std::string output;
  Task task = Task::kQA;
  std::string subdomain;
  Provenance provenance = Provenance::kSeed;

  bool operator==(const InstructionSample&) const = default;
};

void validate(const InstructionSample& sample);

// Four-dimension quality score in [0,10] with reasons. Construction validates.
class QualityReport {
 public:
  using Scores = std::map<QualityDimension, double>;
  using Reasons = std::map<QualityDimension, std::string>;

  QualityReport(Scores scores, Reasons reasons, int round);

  const Scores& scores() const { return scores_; }
  const Reasons& reasons() const { return reasons_; }
  int round() const { return round_; }
  double score(QualityDimension d) const { return scores_.at(d); }
  double mean() const;

  bool operator==(const QualityReport&) const = default;

 private:
  Scores scores_;
  Reasons reasons_;
  int round_;
};

struct TieredAnswer {
  AnswerTier tier;
  std::string text;

  bool operator==(const TieredAnswer&) const = default;
};

struct RankedAnswerSet {
  std::string question_id;
  std::string question;
  std::vector<TieredAnswer> tiered_answers;

  bool operator==(const RankedAnswerSet&) const = default;
};

// Exactly four answers in the fixed tier order. Throws kMalformedSet.
void validate(const RankedAnswerSet& set);

struct PreferencePair {
  std::string question_id;
  std::string prompt;
  std::string chosen;
  std::string rejected;
  int pair_rank = 1;

  bool operator==(const PreferencePair&) const = default;
};

void validate(const PreferencePair& pair);

struct CandidateAnswerSet {
  std::string question_id;
  std::string question;
  std::vector<std::string> candidates;
  std::optional<std::vector<double>> scores;

  bool operator==(const CandidateAnswerSet&) const = default;
};

void validate(const CandidateAnswerSet& set);

struct BenchOption {
  std::string label;
  std::string text;

  bool operator==(const BenchOption&) const = default;
};

struct BenchGold {
  std::vector<std::string> labels;  // choice and fact-check kinds
  std::string reference;            // free-form kinds

  bool operator==(const BenchGold&) const = default;
};

struct BenchItem {
  std::string id;
  BenchKind kind = BenchKind::kSingleChoice;
  std::string stem;
  std::vector<BenchOption> options;
  BenchGold gold;

  bool operator==(const BenchItem&) const = default;
};

// Choice kinds need >=2 options, a nonempty gold label set, and gold labels
// drawn from option labels.
void validate(const BenchItem& item);

}  // namespace curator
