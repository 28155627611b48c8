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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curator/pipeline/config.hpp"
#include "curator/pipeline/manifest.hpp"

namespace curator::pipeline {

// What a stage reads or writes; plans are type-checked on these.
enum class Kind {
  kDir,
  kCorpus,
  kStats,
  kGraph,
  kRefineResult,
  kSamples,
  kOutcomes,
  kQuestions,
  kRankedSets,
  kPairs,
  kCandidates,
  kGold,
  kBench,
  kReport,
};

std::string_view to_string(Kind k);

struct StageContext {
  Config config = Config::defaults();
  std::map<std::string, std::string> env;
  std::filesystem::path run_log = "manifests.jsonl";
};

struct StageIo {
  std::filesystem::path in;
  std::filesystem::path out;
  std::map<std::string, std::filesystem::path> extra;  // e.g. "answers" for eval
};

struct StageResult {
  Counts counts;
  bool agent_failure = false;  // the stage finished but every item was parked
};

struct StageDef {
  std::string name;
  Kind in;
  Kind out;
  std::string extension;  // default output extension in plans
  std::vector<std::string> config_prefixes;
  std::vector<std::string> extra_inputs;  // required names in StageIo::extra
  // Side outputs written next to `out`, as (name, suffix) pairs.
  std::vector<std::pair<std::string, std::string>> side_outputs;
  std::function<StageResult(const StageIo&, const StageContext&)> run;
};

const std::vector<StageDef>& stage_registry();
// Throws Error(kUsage) for an unknown name.
const StageDef& find_stage(const std::string& name);

struct StageRun {
  RunManifest manifest;
  bool agent_failure = false;
};

// Runs one stage, or records a no-op manifest when the run log already holds
// a completed run with identical input digests, config and outputs. The
// manifest is appended only after every output is in place.
StageRun run_stage(const std::string& name, const StageIo& io, const StageContext& ctx);

struct PlanStep {
  std::string stage;
  std::optional<std::filesystem::path> in;   // default: previous step's output
  std::optional<std::filesystem::path> out;  // default: <work>/<NN>-<stage><ext>
  std::map<std::string, std::filesystem::path> extra;
};

struct Plan {
  std::string name;
  std::vector<PlanStep> steps;
};

// {"name": "...", "stages": [{"stage": "ingest", "in": "..."}, ...]}.
// Relative paths resolve against `base_dir`.
Plan load_plan(const std::filesystem::path& file, const std::filesystem::path& base_dir);
Plan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Throws Error(kConfig) when a step has no input or its input kind does not
// match the previous step's output kind.
void check_plan(const Plan& plan);

struct PipelineRun {
  std::vector<StageRun> stages;
  std::vector<std::filesystem::path> outputs;  // primary output per step
};

// Sequential and fail-fast; completed stages keep their outputs and
// manifests, so a rerun resumes at the failed step.
PipelineRun run_pipeline(const Plan& plan, const std::filesystem::path& work_dir,
                         const StageContext& ctx);

}  // namespace curator::pipeline
