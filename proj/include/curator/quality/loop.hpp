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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"
#include "curator/gateway/agent.hpp"

namespace curator::quality {

enum class ThresholdMode { kAllDims, kMean };

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view s);

struct LoopConfig {
  double threshold = 7.0;
  ThresholdMode threshold_mode = ThresholdMode::kAllDims;
  int max_rounds = 10;
  int max_in_flight = 8;  // samples processed concurrently

  void validate() const;
};

// Parses a Check-Agent reply. Accepts {"scores": {...}, "reasons": {...}} or
// per-dimension objects {"accuracy": {"score": x, "reason": "..."}, ...}.
// Returns nullopt when a dimension, its reason, or a valid score is missing.
std::optional<QualityReport> parse_check_reply(const std::string& reply, int round);

// Asks the checker to score the sample. A malformed or failed reply is
// re-asked once; a second failure throws Error(kScoringFailed).
QualityReport score_sample(const InstructionSample& sample, const gateway::AgentHandle& checker,
                           int round = 1);

bool passes(const QualityReport& report, const LoopConfig& cfg);

// Review text handed to the optimizer: one line per dimension.
std::string format_feedback(const QualityReport& report);

// Asks the optimizer for a revised input/output. Only those two fields can
// change; provenance becomes optimized. Throws Error(kOptimizationFailed).
InstructionSample optimize_sample(const InstructionSample& sample, const QualityReport& report,
                                  const gateway::AgentHandle& optimizer);

enum class OutcomeStatus { kAccepted, kDiscarded, kParked };

std::string_view to_string(OutcomeStatus s);
OutcomeStatus parse_outcome_status(std::string_view s);

struct LoopOutcome {
  InstructionSample sample;  // final revision
  OutcomeStatus status = OutcomeStatus::kParked;
  int rounds_used = 0;
  std::vector<QualityReport> history;
  int optimizations = 0;
  bool failed_first_check = false;
  std::string park_reason;
};

nlohmann::json to_json(const LoopOutcome& o);
LoopOutcome outcome_from_json(const nlohmann::json& j);

// Counts named after the columns of the data-volume table: records = inputs,
// filtered = failed the first check, optimized = accepted after at least one
// revision, retained = accepted.
struct BatchStats {
  std::size_t records = 0;
  std::size_t filtered = 0;
  std::size_t optimized = 0;
  std::size_t retained = 0;
  std::size_t discarded = 0;
  std::size_t parked = 0;
};

nlohmann::json to_json(const BatchStats& s);

struct TaskStats {
  std::map<Task, BatchStats> by_task;
  BatchStats total;
};

nlohmann::json to_json(const TaskStats& s);

struct LoopRun {
  std::vector<LoopOutcome> outcomes;  // aligned with the input
  TaskStats stats;
};

LoopOutcome run_sample(const InstructionSample& sample, const LoopConfig& cfg,
                       const gateway::AgentHandle& checker,
                       const gateway::AgentHandle& optimizer);

LoopRun run_quality_loop(const std::vector<InstructionSample>& samples, const LoopConfig& cfg,
                         const gateway::AgentHandle& checker,
                         const gateway::AgentHandle& optimizer);

TaskStats tally(const std::vector<LoopOutcome>& outcomes);

// Ids of accepted samples picked for manual review: per task, a share of
// `total` proportional to the task's accepted count, clamped to
// [min_per_task, max_per_task] and to what is available.
std::map<Task, std::vector<std::string>> expert_sampling_plan(
    const std::vector<LoopOutcome>& outcomes, std::uint64_t seed, std::size_t total = 1500,
    std::size_t min_per_task = 100, std::size_t max_per_task = 200);

}  // namespace curator::quality
