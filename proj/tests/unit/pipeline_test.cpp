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

#include <gtest/gtest.h>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/pipeline/config.hpp"
#include "curator/pipeline/manifest.hpp"
#include "curator/pipeline/stages.hpp"
#include "support.hpp"

namespace curator::pipeline {
namespace {

namespace fs = std::filesystem;

StageContext context(const testing::TempDir& dir) {
  StageContext ctx;
  ctx.run_log = dir / "manifests.jsonl";
  return ctx;
}

TEST(Config, Defaults) {
  auto c = Config::defaults();
  EXPECT_EQ(c.seed(), 42u);
  EXPECT_DOUBLE_EQ(c.get_double("dedup.epsilon"), 0.05);
  EXPECT_EQ(c.get_int("check.max_rounds"), 10);
  EXPECT_DOUBLE_EQ(c.get_double("refine.percentile"), 70);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, LayerPrecedence) {
  testing::TempDir dir;
  write_file_atomic(dir / "c.conf",
                    "# comment\n[dedup]\nepsilon = 0.1\nkeep = lowest_id\n[refine]\nmin_pts = 4\n");
  auto file_only = Config::layered(dir / "c.conf", {}, {});
  EXPECT_DOUBLE_EQ(file_only.get_double("dedup.epsilon"), 0.1);
  EXPECT_EQ(file_only.get("dedup.keep"), "lowest_id");

  auto flags = Config::layered(dir / "c.conf", {{"dedup.epsilon", "0.2"}}, {});
  EXPECT_DOUBLE_EQ(flags.get_double("dedup.epsilon"), 0.2);

  auto env = Config::layered(dir / "c.conf", {{"dedup.epsilon", "0.2"}},
                             {{"CURATOR_DEDUP_EPSILON", "0.3"}, {"CURATOR_REFINE_MIN_PTS", "6"}});
  EXPECT_DOUBLE_EQ(env.get_double("dedup.epsilon"), 0.3);
  EXPECT_EQ(env.get_int("refine.min_pts"), 6);
}

TEST(Config, UnknownKeysAndBadValuesAreConfigErrors) {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kValidation;
  };
  EXPECT_EQ(code_of([] { Config::layered(std::nullopt, {{"dedup.epsilonn", "1"}}, {}); }),
            ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { Config::layered(std::nullopt, {{"dedup.epsilon", "abc"}}, {}).validate(); }),
            ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { Config::layered(std::nullopt, {{"ingest.source", "XYZ"}}, {}).validate(); }),
            ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { Config::layered("/nonexistent/c.conf", {}, {}); }), ErrorCode::kConfig);
}

TEST(Config, SnapshotIncludesSeed) {
  auto snap = Config::defaults().snapshot({"dedup."});
  EXPECT_TRUE(snap.contains("seed"));
  EXPECT_TRUE(snap.contains("dedup.epsilon"));
  EXPECT_FALSE(snap.contains("refine.percentile"));
}

TEST(Config, StubAgentsByDefault) {
  auto h = make_agent("check", Config::defaults(), {}, nullptr);
  EXPECT_EQ(h.role, gateway::Role::kCheck);
  auto r = gateway::dispatch(h, {{"task", "QA"}, {"instruction", "i"}, {"input", ""}, {"output", "o"}});
  EXPECT_TRUE(r.ok);
  EXPECT_THROW(make_agent("nobody", Config::defaults(), {}, nullptr), Error);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, DirectoryDigestTracksContents) {
  testing::TempDir dir;
  fs::create_directories(dir / "d/sub");
  write_file_atomic(dir / "d/a.md", "a");
  write_file_atomic(dir / "d/sub/b.md", "b");
  const auto before = path_digest(dir / "d");
  EXPECT_EQ(path_digest(dir / "d"), before);
  write_file_atomic(dir / "d/sub/b.md", "B");
  EXPECT_NE(path_digest(dir / "d"), before);
}

TEST(Manifest, JsonRoundTrip) {
  RunManifest m;
  m.run_id = "r";
  m.stage = "dedup";
  m.inputs = {{"in", "x", "d1"}};
  m.outputs = {{"out", "y", "d2"}};
  m.config = {{"seed", "42"}};
  m.counts = {20, 15, 5, 0};
  auto back = manifest_from_json(to_json(m));
  EXPECT_EQ(back.inputs, m.inputs);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_EQ(back.counts, m.counts);
  EXPECT_EQ(back.config, m.config);
}

TEST(RunStage, DedupManifestCounts) {
  testing::TempDir dir;
  auto run = run_stage("dedup", {testing::fixture("dedup/corpus.jsonl"), dir / "out.jsonl", {}},
                       context(dir));
  EXPECT_EQ(run.manifest.counts, (Counts{20, 15, 5, 0}));
  EXPECT_FALSE(run.manifest.noop);
  EXPECT_EQ(read_jsonl(dir / "out.jsonl").size(), 15u);
  EXPECT_EQ(read_jsonl(dir / "out.jsonl.removals.jsonl").size(), 5u);
  EXPECT_EQ(RunLog(dir / "manifests.jsonl").load().size(), 1u);
}

TEST(RunStage, RerunIsNoop) {
  testing::TempDir dir;
  StageIo io{testing::fixture("dedup/corpus.jsonl"), dir / "out.jsonl", {}};
  auto first = run_stage("dedup", io, context(dir));
  const auto mtime = fs::last_write_time(dir / "out.jsonl");
  auto second = run_stage("dedup", io, context(dir));
  EXPECT_TRUE(second.manifest.noop);
  EXPECT_EQ(second.manifest.run_id, first.manifest.run_id);
  EXPECT_EQ(second.manifest.outputs, first.manifest.outputs);
  EXPECT_EQ(fs::last_write_time(dir / "out.jsonl"), mtime);

  // A changed config or a tampered output forces a real run.
  auto ctx = context(dir);
  ctx.config.set("dedup.epsilon", "0.01");
  EXPECT_FALSE(run_stage("dedup", io, ctx).manifest.noop);
  write_file_atomic(dir / "out.jsonl", "");
  EXPECT_FALSE(run_stage("dedup", io, context(dir)).manifest.noop);
}

TEST(RunStage, UnknownStageAndMissingExtra) {
  testing::TempDir dir;
  auto code_of = [&](const std::string& stage, StageIo io) {
    try {
      run_stage(stage, io, context(dir));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kValidation;
  };
  EXPECT_EQ(code_of("compress", {testing::fixture("samples.jsonl"), dir / "o", {}}), ErrorCode::kUsage);
  EXPECT_EQ(code_of("eval", {testing::fixture("bench/items.jsonl"), dir / "r.json", {}}),
            ErrorCode::kUsage);
}

TEST(RunStage, RefusesToOverwriteInput) {
  testing::TempDir dir;
  fs::copy_file(testing::fixture("dedup/corpus.jsonl"), dir / "c.jsonl");
  EXPECT_THROW(run_stage("dedup", {dir / "c.jsonl", dir / "c.jsonl", {}}, context(dir)), Error);
}

TEST(RunStage, InvalidKRejectedBeforeWork) {
  testing::TempDir dir;
  auto ctx = context(dir);
  ctx.config.set("rs.k", "9");
  try {
    run_stage("rs-select", {testing::fixture("candidates.jsonl"), dir / "g.jsonl", {}}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidK);
  }
  EXPECT_FALSE(fs::exists(dir / "g.jsonl"));
}

TEST(Plan, ChainingDigests) {
  testing::TempDir dir;
  Plan plan{"p", {{"ingest", testing::fixture("docs"), std::nullopt, {}}, {"dedup", std::nullopt, std::nullopt, {}}}};
  auto run = run_pipeline(plan, dir.path(), context(dir));
  ASSERT_EQ(run.stages.size(), 2u);
  const auto& ingest = run.stages[0].manifest;
  const auto& dedup = run.stages[1].manifest;
  EXPECT_EQ(dedup.inputs.at(0).sha256, ingest.outputs.at(0).sha256);
  EXPECT_EQ(dedup.inputs.at(0).path, ingest.outputs.at(0).path);
  EXPECT_EQ(dedup.counts.in, ingest.counts.out);
  EXPECT_EQ(RunLog(dir / "manifests.jsonl").load().size(), 2u);
}

TEST(Plan, KindMismatchRejectedBeforeExecution) {
  testing::TempDir dir;
  Plan plan{"p", {{"dedup", testing::fixture("dedup/corpus.jsonl"), std::nullopt, {}},
                  {"eval", std::nullopt, std::nullopt, {{"answers", testing::fixture("bench/answers.jsonl")}}}}};
  try {
    run_pipeline(plan, dir.path(), context(dir));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  EXPECT_FALSE(fs::exists(dir / "01-dedup.jsonl"));
  EXPECT_FALSE(fs::exists(dir / "manifests.jsonl"));
}

TEST(Plan, FirstStepNeedsInput) {
  Plan plan{"p", {{"dedup", std::nullopt, std::nullopt, {}}}};
  EXPECT_THROW(check_plan(plan), Error);
}

TEST(Plan, FailureKeepsEarlierOutputsAndResumes) {
  testing::TempDir dir;
  fs::copy_file(testing::fixture("questions.jsonl"), dir / "q.jsonl");
  Plan plan{"p", {{"tiers", dir / "q.jsonl", std::nullopt, {}},
                  {"rlhf-pairs", std::nullopt, std::nullopt, {}},
                  {"rs-select", testing::fixture("candidates.jsonl"), std::nullopt, {}}}};
  auto ctx = context(dir);
  ctx.config.set("rs.k", "99");
  EXPECT_THROW(run_pipeline(plan, dir.path(), ctx), Error);
  EXPECT_TRUE(fs::exists(dir / "01-tiers.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "02-rlhf-pairs.jsonl"));
  EXPECT_EQ(RunLog(dir / "manifests.jsonl").load().size(), 2u);

  auto resumed = run_pipeline(plan, dir.path(), context(dir));
  EXPECT_TRUE(resumed.stages[0].manifest.noop);
  EXPECT_TRUE(resumed.stages[1].manifest.noop);
  EXPECT_FALSE(resumed.stages[2].manifest.noop);
}

TEST(Plan, LoadsShippedPlans) {
  for (const auto* name : {"pretraining", "instruction", "rlhf", "eval"}) {
    auto plan = load_plan(testing::source_dir() / "plans" / (std::string(name) + ".json"),
                          testing::source_dir());
    EXPECT_NO_THROW(check_plan(plan)) << name;
  }
}

TEST(Plan, PretrainingCountsConsistent) {
  testing::TempDir dir;
  auto plan = load_plan(testing::source_dir() / "plans/pretraining.json", testing::source_dir());
  auto run = run_pipeline(plan, dir.path(), context(dir));
  ASSERT_EQ(run.stages.size(), 4u);
  for (const auto& s : run.stages) {
    const auto& c = s.manifest.counts;
    EXPECT_EQ(c.in, c.out + c.dropped + c.parked) << s.manifest.stage;
  }
  EXPECT_EQ(run.stages[1].manifest.counts.in, run.stages[0].manifest.counts.out);
  EXPECT_EQ(run.stages[2].manifest.counts.in, run.stages[1].manifest.counts.out);
  EXPECT_EQ(read_jsonl(run.outputs[1]).size(), run.stages[1].manifest.counts.out);
}

TEST(Plan, InstructionStageWritesTableShapedStats) {
  testing::TempDir dir;
  auto plan = load_plan(testing::source_dir() / "plans/instruction.json", testing::source_dir());
  auto run = run_pipeline(plan, dir.path(), context(dir));
  auto stats = nlohmann::json::parse(read_file(run.outputs[0].string() + ".stats.json"));
  const auto& total = stats["total"];
  for (const auto* k : {"records", "filtered", "optimized", "retained"}) EXPECT_TRUE(total.contains(k));
  EXPECT_EQ(total["records"].get<std::size_t>(), read_jsonl(testing::fixture("samples.jsonl")).size());
  EXPECT_EQ(total["retained"].get<std::size_t>() + total["discarded"].get<std::size_t>() +
                total["parked"].get<std::size_t>(),
            total["records"].get<std::size_t>());
}

}  // namespace
}  // namespace curator::pipeline
