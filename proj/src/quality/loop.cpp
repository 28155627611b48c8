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

#include "curator/quality/loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "curator/core/codec.hpp"
#include "curator/core/error.hpp"
#include "curator/core/log.hpp"
#include "curator/core/parallel.hpp"
#include "curator/core/random.hpp"

namespace curator::quality {

using gateway::AgentHandle;
using nlohmann::json;

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kAllDims ? "all_dims" : "mean";
}

ThresholdMode parse_threshold_mode(std::string_view s) {
  if (s == "all_dims") return ThresholdMode::kAllDims;
  if (s == "mean") return ThresholdMode::kMean;
  throw Error(ErrorCode::kConfig, "unknown threshold mode '" + std::string(s) + "'");
}

void LoopConfig::validate() const {
  require(threshold >= 0.0 && threshold <= 10.0, "threshold must be in [0,10]", ErrorCode::kConfig);
  require(max_rounds >= 1, "max_rounds must be >= 1", ErrorCode::kConfig);
  require(max_in_flight >= 1, "max_in_flight must be >= 1", ErrorCode::kConfig);
}

namespace {

std::optional<double> as_score(const json& v) {
  double x;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) return std::nullopt;
    while (*end == ' ') ++end;
    if (*end != '\0') return std::nullopt;  // rejects "8/10"
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(x) || x < 0.0 || x > 10.0) return std::nullopt;
  return x;
}

gateway::SlotMap sample_slots(const InstructionSample& s) {
  return {{"task", std::string(to_string(s.task))},
          {"instruction", s.instruction},
          {"input", s.input},
          {"output", s.output},
          {"subdomain", s.subdomain}};
}

}  // namespace

std::optional<QualityReport> parse_check_reply(const std::string& reply, int round) {
  auto obj = gateway::extract_json_object(reply);
  if (!obj) return std::nullopt;
  const json& j = *obj;
  QualityReport::Scores scores;
  QualityReport::Reasons reasons;
  for (QualityDimension d : kAllDimensions) {
    const std::string key(to_string(d));
    std::optional<double> score;
    std::string reason;
    if (j.contains("scores") && j["scores"].is_object()) {
      if (j["scores"].contains(key)) score = as_score(j["scores"][key]);
      if (j.contains("reasons") && j["reasons"].is_object() && j["reasons"].contains(key) &&
          j["reasons"][key].is_string()) {
        reason = j["reasons"][key].get<std::string>();
      }
    } else if (j.contains(key) && j[key].is_object()) {
      const json& e = j[key];
      if (e.contains("score")) score = as_score(e["score"]);
      if (e.contains("reason") && e["reason"].is_string()) reason = e["reason"].get<std::string>();
    }
    if (!score || reason.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
    scores[d] = *score;
    reasons[d] = reason;
  }
  return QualityReport(std::move(scores), std::move(reasons), round);
}

QualityReport score_sample(const InstructionSample& sample, const AgentHandle& checker, int round) {
  const auto slots = sample_slots(sample);
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto r = gateway::dispatch(checker, slots);
    if (!r.ok) {
      last_error = r.error;
      continue;
    }
    if (auto report = parse_check_reply(r.text, round)) return *report;
    last_error = "malformed check reply";
  }
  throw Error(ErrorCode::kScoringFailed, "sample '" + sample.id + "': " + last_error);
}

bool passes(const QualityReport& report, const LoopConfig& cfg) {
  if (cfg.threshold_mode == ThresholdMode::kMean) return report.mean() >= cfg.threshold;
  for (const auto& [d, v] : report.scores()) {
    if (v < cfg.threshold) return false;
  }
  return true;
}

std::string format_feedback(const QualityReport& report) {
  std::string out;
  for (QualityDimension d : kAllDimensions) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " (%.1f/10): ", report.score(d));
    out += std::string(to_string(d)) + buf + report.reasons().at(d) + "\n";
  }
  return out;
}

InstructionSample optimize_sample(const InstructionSample& sample, const QualityReport& report,
                                  const AgentHandle& optimizer) {
  auto slots = sample_slots(sample);
  slots["feedback"] = format_feedback(report);
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto r = gateway::dispatch(optimizer, slots);
    if (!r.ok) {
      last_error = r.error;
      continue;
    }
    auto obj = gateway::extract_json_object(r.text);
    if (!obj || !obj->contains("output") || !(*obj)["output"].is_string()) {
      last_error = "malformed optimize reply";
      continue;
    }
    InstructionSample revised = sample;
    revised.output = (*obj)["output"].get<std::string>();
    if (obj->contains("input") && (*obj)["input"].is_string()) {
      revised.input = (*obj)["input"].get<std::string>();
    }
    revised.provenance = Provenance::kOptimized;
    return revised;
  }
  throw Error(ErrorCode::kOptimizationFailed, "sample '" + sample.id + "': " + last_error);
}

std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::kAccepted: return "accepted";
    case OutcomeStatus::kDiscarded: return "discarded";
    case OutcomeStatus::kParked: return "parked";
  }
  return "parked";
}

OutcomeStatus parse_outcome_status(std::string_view s) {
  if (s == "accepted") return OutcomeStatus::kAccepted;
  if (s == "discarded") return OutcomeStatus::kDiscarded;
  if (s == "parked") return OutcomeStatus::kParked;
  throw Error(ErrorCode::kValidation, "unknown outcome status '" + std::string(s) + "'");
}

json to_json(const LoopOutcome& o) {
  json history = json::array();
  for (const auto& r : o.history) history.push_back(r);
  json j = {{"sample", o.sample},
            {"status", std::string(to_string(o.status))},
            {"rounds_used", o.rounds_used},
            {"optimizations", o.optimizations},
            {"failed_first_check", o.failed_first_check},
            {"history", history}};
  if (!o.park_reason.empty()) j["park_reason"] = o.park_reason;
  return j;
}

LoopOutcome outcome_from_json(const json& j) {
  LoopOutcome o;
  try {
    o.sample = j.at("sample").get<InstructionSample>();
    o.status = parse_outcome_status(j.at("status").get<std::string>());
    o.rounds_used = j.at("rounds_used").get<int>();
    o.optimizations = j.value("optimizations", 0);
    o.failed_first_check = j.value("failed_first_check", false);
    for (const auto& r : j.at("history")) o.history.push_back(quality_report_from_json(r));
    o.park_reason = j.value("park_reason", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("loop outcome: ") + e.what());
  }
  require(o.rounds_used == static_cast<int>(o.history.size()),
          "loop outcome: rounds_used must equal history length");
  return o;
}

json to_json(const BatchStats& s) {
  return {{"records", s.records},     {"filtered", s.filtered},   {"optimized", s.optimized},
          {"retained", s.retained},   {"discarded", s.discarded}, {"parked", s.parked}};
}

json to_json(const TaskStats& s) {
  json by_task = json::object();
  for (const auto& [task, stats] : s.by_task) by_task[std::string(to_string(task))] = to_json(stats);
  return {{"by_task", by_task}, {"total", to_json(s.total)}};
}

LoopOutcome run_sample(const InstructionSample& sample, const LoopConfig& cfg,
                       const AgentHandle& checker, const AgentHandle& optimizer) {
  LoopOutcome o;
  o.sample = sample;
  try {
    for (int round = 1; round <= cfg.max_rounds; ++round) {
      o.history.push_back(score_sample(o.sample, checker, round));
      o.rounds_used = round;
      const bool ok = passes(o.history.back(), cfg);
      if (round == 1) o.failed_first_check = !ok;
      if (ok) {
        o.status = OutcomeStatus::kAccepted;
        return o;
      }
      if (round == cfg.max_rounds) break;
      o.sample = optimize_sample(o.sample, o.history.back(), optimizer);
      ++o.optimizations;
    }
    o.status = OutcomeStatus::kDiscarded;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kScoringFailed && e.code() != ErrorCode::kOptimizationFailed) throw;
    o.status = OutcomeStatus::kParked;
    o.park_reason = e.what();
  }
  return o;
}

TaskStats tally(const std::vector<LoopOutcome>& outcomes) {
  TaskStats ts;
  auto add = [](BatchStats& s, const LoopOutcome& o) {
    ++s.records;
    if (o.failed_first_check) ++s.filtered;
    switch (o.status) {
      case OutcomeStatus::kAccepted:
        ++s.retained;
        if (o.optimizations > 0) ++s.optimized;
        break;
      case OutcomeStatus::kDiscarded: ++s.discarded; break;
      case OutcomeStatus::kParked: ++s.parked; break;
    }
  };
  for (const auto& o : outcomes) {
    add(ts.by_task[o.sample.task], o);
    add(ts.total, o);
  }
  return ts;
}

LoopRun run_quality_loop(const std::vector<InstructionSample>& samples, const LoopConfig& cfg,
                         const AgentHandle& checker, const AgentHandle& optimizer) {
  cfg.validate();
  LoopRun run;
  run.outcomes.resize(samples.size());
  parallel_for(
      samples.size(),
      [&](std::size_t i) { run.outcomes[i] = run_sample(samples[i], cfg, checker, optimizer); },
      static_cast<std::size_t>(cfg.max_in_flight));
  run.stats = tally(run.outcomes);
  for (const auto& o : run.outcomes) {
    if (o.status == OutcomeStatus::kParked) log::warn("parked: " + o.park_reason);
  }
  return run;
}

std::map<Task, std::vector<std::string>> expert_sampling_plan(const std::vector<LoopOutcome>& outcomes,
                                                              std::uint64_t seed, std::size_t total,
                                                              std::size_t min_per_task,
                                                              std::size_t max_per_task) {
  require(min_per_task <= max_per_task, "min_per_task must not exceed max_per_task",
          ErrorCode::kInvalidArgument);
  std::map<Task, std::vector<std::string>> pool;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.status != OutcomeStatus::kAccepted) continue;
    pool[o.sample.task].push_back(o.sample.id.empty() ? "#" + std::to_string(i) : o.sample.id);
    ++accepted;
  }
  std::map<Task, std::vector<std::string>> plan;
  for (auto& [task, ids] : pool) {
    const double share = static_cast<double>(total) * static_cast<double>(ids.size()) /
                         static_cast<double>(accepted);
    std::size_t want = static_cast<std::size_t>(std::llround(share));
    want = std::clamp(want, min_per_task, max_per_task);
    want = std::min(want, ids.size());
    std::sort(ids.begin(), ids.end());
    Rng rng(mix64(seed ^ (static_cast<std::uint64_t>(task) + 1)));
    // Partial Fisher-Yates with the portable index helper.
    for (std::size_t k = 0; k < want; ++k) {
      std::size_t j = k + uniform_index(rng, ids.size() - k);
      std::swap(ids[k], ids[j]);
    }
    std::vector<std::string> pick(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(pick.begin(), pick.end());
    plan[task] = std::move(pick);
  }
  return plan;
}

}  // namespace curator::quality
