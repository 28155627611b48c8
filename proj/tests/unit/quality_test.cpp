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

#include <json.hpp>

#include "curator/core/codec.hpp"
#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/gateway/agent.hpp"
#include "curator/quality/loop.hpp"
#include "support.hpp"

namespace curator::quality {
namespace {

using gateway::make_stub_handle;
using gateway::Role;
using gateway::StubReply;
using gateway::StubTransport;

std::string check_reply(double a, double c, double r, double u) {
  nlohmann::json j;
  j["scores"] = {{"accuracy", a}, {"completeness", c}, {"relevance", r}, {"usefulness", u}};
  j["reasons"] = {{"accuracy", "acc"}, {"completeness", "comp"}, {"relevance", "rel"},
                  {"usefulness", "use"}};
  return j.dump();
}

QualityReport report(double a, double c, double r, double u) {
  return *parse_check_reply(check_reply(a, c, r, u), 1);
}

InstructionSample sample(std::string id = "s1", Task task = Task::kQA) {
  return {std::move(id), "Answer the question.", "What is droop control?",
          "It shares load.", task, "smart grid", Provenance::kAgentGenerated};
}

std::shared_ptr<StubTransport> appending_optimizer() {
  return std::make_shared<StubTransport>([](const gateway::HttpRequest& req, std::uint64_t) {
    const std::string out = req.slots->at("output") + " Droop sets power against frequency.";
    return StubReply::ok(nlohmann::json{{"output", out}}.dump());
  });
}

TEST(ParseCheckReply, BothShapes) {
  auto a = parse_check_reply(check_reply(9, 8, 7, 6), 2);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->round(), 2);
  EXPECT_EQ(a->score(QualityDimension::kUsefulness), 6.0);
  auto b = parse_check_reply(
      R"({"accuracy": {"score": "8", "reason": "a"}, "completeness": {"score": 7, "reason": "b"},
          "relevance": {"score": 9.5, "reason": "c"}, "usefulness": {"score": 6, "reason": "d"}})",
      1);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->score(QualityDimension::kAccuracy), 8.0);
}

TEST(ParseCheckReply, RejectsIncompleteOrInvalid) {
  EXPECT_FALSE(parse_check_reply(R"({"scores": {"accuracy": 9}})", 1));
  EXPECT_FALSE(parse_check_reply(check_reply(11, 8, 8, 8), 1));
  auto j = nlohmann::json::parse(check_reply(8, 8, 8, 8));
  j["scores"]["relevance"] = "8/10";
  EXPECT_FALSE(parse_check_reply(j.dump(), 1));
  j = nlohmann::json::parse(check_reply(8, 8, 8, 8));
  j["reasons"]["relevance"] = " ";
  EXPECT_FALSE(parse_check_reply(j.dump(), 1));
}

TEST(Passes, Examples) {
  LoopConfig cfg;
  EXPECT_TRUE(passes(report(7, 7, 7, 7), cfg));
  EXPECT_FALSE(passes(report(10, 10, 10, 6.9), cfg));
  cfg.threshold_mode = ThresholdMode::kMean;
  EXPECT_DOUBLE_EQ(report(10, 10, 10, 6.9).mean(), 9.225);
  EXPECT_TRUE(passes(report(10, 10, 10, 6.9), cfg));
}

TEST(ScoreSample, FixedStubScores) {
  auto h = make_stub_handle(Role::kCheck, StubTransport::fixed(check_reply(9, 9, 9, 9)));
  auto r = score_sample(sample(), h);
  for (auto d : kAllDimensions) EXPECT_EQ(r.score(d), 9.0);
}

TEST(ScoreSample, MissingDimensionRetriedThenFails) {
  auto stub = StubTransport::fixed(R"({"scores": {"accuracy": 9}, "reasons": {"accuracy": "x"}})");
  auto h = make_stub_handle(Role::kCheck, stub);
  try {
    score_sample(sample(), h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoringFailed);
  }
  EXPECT_EQ(stub->calls(), 2u);
}

TEST(ScoreSample, GoldenTranscriptHandParsed) {
  const auto path = testing::fixture("transcripts/check_golden.jsonl");
  auto rec = read_jsonl(path).at(0);
  const std::string reply = rec["response"]["choices"][0]["message"]["content"];
  // Values read off the recorded reply by hand.
  auto parsed = parse_check_reply(reply, 1);
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed->score(QualityDimension::kAccuracy), 7.5);
  EXPECT_EQ(parsed->score(QualityDimension::kCompleteness), 4.0);
  EXPECT_EQ(parsed->score(QualityDimension::kRelevance), 9.0);
  EXPECT_EQ(parsed->score(QualityDimension::kUsefulness), 5.5);

  auto s = nlohmann::json::parse(read_file(testing::fixture("transcripts/check_sample.json")))
               .get<InstructionSample>();
  auto h = make_stub_handle(Role::kCheck, gateway::ReplayTransport::from_file(path), "o1");
  EXPECT_EQ(score_sample(s, h), *parsed);
}

TEST(OptimizeSample, StubAppendsCorrection) {
  auto h = make_stub_handle(Role::kOptimize, appending_optimizer());
  auto before = sample("s1", Task::kNER);
  auto after = optimize_sample(before, report(5, 5, 5, 5), h);
  EXPECT_NE(after.output, before.output);
  EXPECT_EQ(after.provenance, Provenance::kOptimized);
  EXPECT_EQ(after.task, Task::kNER);
  EXPECT_EQ(after.instruction, before.instruction);
  EXPECT_EQ(after.id, before.id);
}

TEST(OptimizeSample, MalformedReplyFails) {
  auto h = make_stub_handle(Role::kOptimize, StubTransport::fixed("I improved it."));
  try {
    optimize_sample(sample(), report(5, 5, 5, 5), h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOptimizationFailed);
  }
}

TEST(OptimizeSample, FeedbackCarriesScoresAndReasons) {
  auto text = format_feedback(report(6, 8.5, 9, 7));
  EXPECT_NE(text.find("accuracy (6.0/10): acc"), std::string::npos);
  EXPECT_NE(text.find("completeness (8.5/10): comp"), std::string::npos);
}

TEST(OptimizeSample, RecordedRevisionReplays) {
  const auto pre = nlohmann::json::parse(read_file(testing::fixture("transcripts/fig3_pre.json")))
                       .get<InstructionSample>();
  const auto post = read_file(testing::fixture("transcripts/fig3_post.txt"));
  auto replay = gateway::ReplayTransport::from_file(
      testing::fixture("transcripts/optimize_replay.jsonl"));
  auto checker = make_stub_handle(Role::kCheck, replay, "o1");
  auto optimizer = make_stub_handle(Role::kOptimize, replay, "o1");
  auto o = run_sample(pre, {}, checker, optimizer);
  EXPECT_EQ(o.status, OutcomeStatus::kAccepted);
  EXPECT_EQ(o.rounds_used, 2);
  EXPECT_TRUE(o.failed_first_check);
  EXPECT_EQ(o.sample.output, post);
  EXPECT_EQ(o.sample.input, pre.input);
  EXPECT_EQ(o.sample.task, pre.task);
}

TEST(Loop, AlwaysPassAcceptsInOneRound) {
  auto checker = make_stub_handle(Role::kCheck, StubTransport::fixed(check_reply(8, 8, 8, 8)));
  auto opt = make_stub_handle(Role::kOptimize, appending_optimizer());
  std::vector<InstructionSample> in{sample("a"), sample("b"), sample("c")};
  auto run = run_quality_loop(in, {}, checker, opt);
  for (const auto& o : run.outcomes) {
    EXPECT_EQ(o.status, OutcomeStatus::kAccepted);
    EXPECT_EQ(o.rounds_used, 1);
    EXPECT_EQ(o.optimizations, 0);
  }
  EXPECT_EQ(run.stats.total.retained, 3u);
  EXPECT_EQ(run.stats.total.filtered, 0u);
}

TEST(Loop, AlwaysFailDiscardsAtCap) {
  auto checker = make_stub_handle(Role::kCheck, StubTransport::fixed(check_reply(3, 3, 3, 3)));
  auto opt = make_stub_handle(Role::kOptimize, appending_optimizer());
  auto o = run_sample(sample(), {}, checker, opt);
  EXPECT_EQ(o.status, OutcomeStatus::kDiscarded);
  EXPECT_EQ(o.rounds_used, 10);
  EXPECT_EQ(o.history.size(), 10u);
  EXPECT_EQ(o.optimizations, 9);
}

TEST(Loop, PassOnRoundThree) {
  auto checker = make_stub_handle(
      Role::kCheck, StubTransport::scripted({StubReply::ok(check_reply(4, 5, 6, 5)),
                                             StubReply::ok(check_reply(6, 6, 8, 6)),
                                             StubReply::ok(check_reply(8, 7, 9, 7))}));
  auto opt = make_stub_handle(Role::kOptimize, appending_optimizer());
  auto o = run_sample(sample(), {}, checker, opt);
  EXPECT_EQ(o.status, OutcomeStatus::kAccepted);
  EXPECT_EQ(o.rounds_used, 3);
  ASSERT_EQ(o.history.size(), 3u);
  EXPECT_EQ(o.history[2].round(), 3);
  EXPECT_EQ(o.optimizations, 2);
  EXPECT_EQ(o.sample.provenance, Provenance::kOptimized);
}

TEST(Loop, AgentFailuresPark) {
  auto dead = make_stub_handle(Role::kCheck, StubTransport::scripted({StubReply::http_error(400)}));
  auto opt = make_stub_handle(Role::kOptimize, appending_optimizer());
  auto o = run_sample(sample(), {}, dead, opt);
  EXPECT_EQ(o.status, OutcomeStatus::kParked);
  EXPECT_FALSE(o.park_reason.empty());

  auto failing = make_stub_handle(Role::kCheck, StubTransport::fixed(check_reply(2, 2, 2, 2)));
  auto bad_opt = make_stub_handle(Role::kOptimize, StubTransport::fixed("no json"));
  auto p = run_sample(sample(), {}, failing, bad_opt);
  EXPECT_EQ(p.status, OutcomeStatus::kParked);
  EXPECT_EQ(p.history.size(), 1u);
}

TEST(Loop, OutcomeJsonRoundTrip) {
  auto checker = make_stub_handle(
      Role::kCheck, StubTransport::scripted({StubReply::ok(check_reply(4, 5, 6, 5)),
                                             StubReply::ok(check_reply(8, 8, 8, 8))}));
  auto opt = make_stub_handle(Role::kOptimize, appending_optimizer());
  auto o = run_sample(sample(), {}, checker, opt);
  auto back = outcome_from_json(to_json(o));
  EXPECT_EQ(to_json(back), to_json(o));
}

TEST(Tally, TableColumns) {
  std::vector<LoopOutcome> outs(5);
  outs[0].sample.task = Task::kQA;
  outs[0].status = OutcomeStatus::kAccepted;
  outs[1].sample.task = Task::kQA;
  outs[1].status = OutcomeStatus::kAccepted;
  outs[1].failed_first_check = true;
  outs[1].optimizations = 1;
  outs[2].sample.task = Task::kSum;
  outs[2].status = OutcomeStatus::kDiscarded;
  outs[2].failed_first_check = true;
  outs[3].sample.task = Task::kSum;
  outs[3].status = OutcomeStatus::kParked;
  outs[4].sample.task = Task::kSum;
  outs[4].status = OutcomeStatus::kAccepted;
  auto t = tally(outs);
  EXPECT_EQ(t.total.records, 5u);
  EXPECT_EQ(t.total.filtered, 2u);
  EXPECT_EQ(t.total.optimized, 1u);
  EXPECT_EQ(t.total.retained, 3u);
  EXPECT_EQ(t.total.discarded, 1u);
  EXPECT_EQ(t.total.parked, 1u);
  EXPECT_EQ(t.by_task.at(Task::kQA).retained, 2u);
  EXPECT_EQ(t.by_task.at(Task::kSum).records, 3u);
}

TEST(ExpertSampling, ProportionalClampedDeterministic) {
  std::vector<LoopOutcome> outs;
  auto add = [&](Task t, int n) {
    for (int i = 0; i < n; ++i) {
      LoopOutcome o;
      o.sample.id = std::string(to_string(t)) + "-" + std::to_string(i);
      o.sample.task = t;
      o.status = OutcomeStatus::kAccepted;
      outs.push_back(o);
    }
  };
  add(Task::kQA, 5000);
  add(Task::kSum, 1000);
  add(Task::kNER, 50);
  auto plan = expert_sampling_plan(outs, 7);
  EXPECT_EQ(plan.at(Task::kQA).size(), 200u);
  EXPECT_EQ(plan.at(Task::kSum).size(), 200u);
  EXPECT_EQ(plan.at(Task::kNER).size(), 50u);
  EXPECT_EQ(plan, expert_sampling_plan(outs, 7));
  EXPECT_NE(plan.at(Task::kQA), expert_sampling_plan(outs, 8).at(Task::kQA));
  std::set<std::string> unique(plan.at(Task::kQA).begin(), plan.at(Task::kQA).end());
  EXPECT_EQ(unique.size(), 200u);
}

TEST(LoopConfigValidation, RejectsBadValues) {
  LoopConfig c;
  c.max_rounds = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.threshold = 11;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW(parse_threshold_mode("median"), Error);
}

}  // namespace
}  // namespace curator::quality
