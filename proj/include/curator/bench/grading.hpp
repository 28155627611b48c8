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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"
#include "curator/gateway/agent.hpp"

namespace curator::bench {

enum class CreditDetail { kFull, kPartial, kZero };

std::string_view to_string(CreditDetail d);

struct GradingResult {
  std::string item_id;
  BenchKind kind = BenchKind::kSingleChoice;
  double credit = 0.0;
  CreditDetail detail = CreditDetail::kZero;
  std::vector<std::string> flags;  // "invalid", "empty", "unparseable", "missing"
};

nlohmann::json to_json(const GradingResult& r);

// Credit 1 iff the label is the gold label. A label that is not an option
// scores 0 and is flagged "invalid".
GradingResult grade_single_choice(const BenchItem& item, const std::string& answer);

// Any wrong label -> 0; exact match -> 1; proper subset -> |answers|/|gold|.
// An empty selection scores 0 and is flagged "empty".
GradingResult grade_multiple_choice(const BenchItem& item, const std::vector<std::string>& answers);

// Accepts true/false, yes/no, t/f, y/n, 1/0 and correct/incorrect in any
// case. Anything else scores 0 and is flagged "unparseable".
GradingResult grade_fact_check(const BenchItem& item, const std::string& answer);

std::optional<bool> parse_boolean_label(const std::string& answer);

// Splits "A, C", "A;C", "A C", "[\"A\",\"C\"]" or "AC" into labels known to
// the item. Unknown tokens are kept so the grader can reject them.
std::vector<std::string> parse_label_set(const BenchItem& item, const std::string& answer);

// Grades a model answer (string, string array or boolean) against an
// objective item.
GradingResult grade(const BenchItem& item, const nlohmann::json& answer);

struct SubjectiveScore {
  std::string item_id;
  BenchKind kind = BenchKind::kQA;
  std::optional<double> a_score;
  std::optional<double> e_score;
  std::string judge_transcript;  // raw judge replies, A then E
  std::vector<std::string> flags;
  bool parked = false;
};

nlohmann::json to_json(const SubjectiveScore& s);

// A-score prompt carries the reference answer, E-score prompt does not.
// Each score gets one retry on an unparseable or out-of-range reply, after
// which it is flagged; a judge transport failure parks the item.
SubjectiveScore judge_subjective(const BenchItem& item, const std::string& candidate_answer,
                                 const std::string& reference_answer,
                                 const gateway::AgentHandle& judge);

struct ObjectiveRow {
  std::size_t items = 0;
  double credit = 0.0;
  double accuracy = 0.0;  // percent
};

struct SubjectiveRow {
  std::size_t items = 0;
  std::size_t scored = 0;
  std::size_t parked = 0;
  std::optional<double> a_score;  // mean over scored items
  std::optional<double> e_score;
  std::optional<std::string> h_grade;  // imported, never computed
};

struct BenchReport {
  std::string model;
  std::map<BenchKind, ObjectiveRow> objective;
  std::map<BenchKind, SubjectiveRow> subjective;
  std::optional<double> objective_average;  // percent
  std::size_t flagged = 0;
};

// Unweighted mean of the task accuracies.
double objective_average(const std::vector<double>& task_accuracies);

BenchReport aggregate(const std::vector<GradingResult>& results,
                      const std::vector<SubjectiveScore>& subjective = {},
                      const std::map<BenchKind, std::string>& human_grades = {});

// Columns S-C, M-C, FC, then A/E/H for ESM, Exp and Q&A, plus the average.
nlohmann::json to_json(const BenchReport& r);

struct ModelAnswer {
  std::string item_id;
  nlohmann::json answer;
};

std::vector<ModelAnswer> answers_from_jsonl(const std::vector<nlohmann::json>& rows);

struct EvalOptions {
  std::string model = "model";
  const gateway::AgentHandle* judge = nullptr;  // subjective items are skipped without one
  int max_in_flight = 4;
  std::map<BenchKind, std::string> human_grades;
};

struct EvalRun {
  std::vector<GradingResult> objective;
  std::vector<SubjectiveScore> subjective;
  BenchReport report;
  std::size_t unanswered = 0;
};

// Items without an answer score 0 and are flagged "missing".
EvalRun evaluate(const std::vector<BenchItem>& items, const std::vector<ModelAnswer>& answers,
                 const EvalOptions& options);

}  // namespace curator::bench
