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

#include "curator/pipeline/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "curator/bench/grading.hpp"
#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/log.hpp"
#include "curator/distiller/dedup.hpp"
#include "curator/distiller/embedding.hpp"
#include "curator/ingest/ingest.hpp"
#include "curator/litref/refine.hpp"
#include "curator/quality/loop.hpp"
#include "curator/rlhf/preference.hpp"

namespace curator::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::kDir: return "dir";
    case Kind::kCorpus: return "corpus";
    case Kind::kStats: return "stats";
    case Kind::kGraph: return "graph";
    case Kind::kRefineResult: return "refine_result";
    case Kind::kSamples: return "samples";
    case Kind::kOutcomes: return "outcomes";
    case Kind::kQuestions: return "questions";
    case Kind::kRankedSets: return "ranked_sets";
    case Kind::kPairs: return "pairs";
    case Kind::kCandidates: return "candidates";
    case Kind::kGold: return "gold";
    case Kind::kBench: return "bench";
    case Kind::kReport: return "report";
  }
  return "?";
}

namespace {

fs::path side(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p += suffix;
  return p;
}

Corpus read_corpus(const fs::path& p) {
  Corpus c;
  c.documents = read_jsonl_as<Document>(p);
  c = recompute_stats(std::move(c));
  validate(c);
  return c;
}

void write_json(const fs::path& p, const json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

void write_transcripts(const fs::path& p, const gateway::TranscriptSink& sink) {
  auto records = sink.records();
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.call_id < b.call_id; });
  std::vector<json> lines;
  for (const auto& t : records) lines.push_back(gateway::to_json(t));
  write_file_atomic(p, to_jsonl(lines));
}

// ---- stages ----------------------------------------------------------------

StageResult run_ingest(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  ingest::IngestOptions opts;
  opts.normalize = c.get_bool("ingest.normalize");
  auto loaded = ingest::ingest_directory(io.in, parse_source(c.get("ingest.source")),
                                         c.get("ingest.subdomain"), opts);
  Corpus kept = loaded.corpus;
  std::vector<ingest::DocumentReport> reports = loaded.reports;
  if (c.get_bool("ingest.filter")) {
    auto filtered = ingest::apply_filter(loaded.corpus, loaded.reports, filter_policy(c));
    kept = std::move(filtered.kept);
    reports = std::move(filtered.reports);
  }
  std::vector<json> report_lines;
  for (const auto& r : reports) report_lines.push_back(ingest::to_json(r));
  for (const auto& s : loaded.skipped) report_lines.push_back({{"path", s.path}, {"skipped", s.reason}});
  write_file_atomic(side(io.out, ".reports.jsonl"), to_jsonl(report_lines));
  write_file_atomic(io.out, to_jsonl_of(kept.documents));

  StageResult r;
  r.counts.in = loaded.corpus.documents.size() + loaded.skipped.size();
  r.counts.out = kept.documents.size();
  r.counts.dropped = r.counts.in - r.counts.out;
  return r;
}

StageResult run_dedup(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  Corpus corpus = read_corpus(io.in);
  const auto cfg = dedup_config(c);
  StageResult r;
  r.counts.in = corpus.documents.size();
  distiller::DedupResult result;
  if (corpus.documents.empty()) {
    result.corpus = corpus;
  } else {
    distiller::EmbedOptions eo;
    if (c.get("dedup.embedding") == "remote") {
      auto sink = std::make_shared<gateway::TranscriptSink>();
      distiller::RemoteEmbeddingProvider provider(make_embedding_endpoint(c, ctx.env, sink),
                                                  static_cast<std::size_t>(c.get_int("dedup.dim")));
      eo.checkpoint = side(io.out, ".embeddings.ckpt");
      result = distiller::deduplicate(corpus, cfg, provider, c.seed(), eo);
    } else {
      distiller::FeatureHashProvider provider(static_cast<std::size_t>(c.get_int("dedup.dim")),
                                              c.seed());
      result = distiller::deduplicate(corpus, cfg, provider, c.seed(), eo);
    }
  }
  std::vector<json> removals;
  for (const auto& rm : result.removals) removals.push_back(distiller::to_json(rm));
  write_file_atomic(side(io.out, ".removals.jsonl"), to_jsonl(removals));
  write_file_atomic(io.out, to_jsonl_of(result.corpus.documents));
  r.counts.out = result.corpus.documents.size();
  r.counts.dropped = r.counts.in - r.counts.out;
  return r;
}

StageResult run_stats(const StageIo& io, const StageContext&) {
  Corpus corpus = read_corpus(io.in);
  json j = corpus.stats;
  std::map<std::string, std::size_t> by_subdomain;
  for (const auto& d : corpus.documents) ++by_subdomain[d.subdomain];
  j["by_subdomain"] = by_subdomain;
  write_json(io.out, j);
  StageResult r;
  r.counts.in = r.counts.out = corpus.documents.size();
  return r;
}

StageResult run_refine(const StageIo& io, const StageContext& ctx) {
  auto graph = citation_graph_from_jsonl_lines(read_jsonl(io.in));
  auto result = litref::refine(graph, refine_config(ctx.config));
  write_json(io.out, litref::to_json(result));
  StageResult r;
  r.counts.in = graph.nodes.size();
  r.counts.out = result.v_double_prime.size();
  r.counts.dropped = r.counts.in - r.counts.out;
  return r;
}

StageResult run_check(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  auto samples = read_jsonl_as<InstructionSample>(io.in);
  for (const auto& s : samples) validate(s);
  auto sink = std::make_shared<gateway::TranscriptSink>();
  auto checker = make_agent("check", c, ctx.env, sink);
  auto optimizer = make_agent("optimize", c, ctx.env, sink);
  auto run = quality::run_quality_loop(samples, loop_config(c), checker, optimizer);

  std::vector<json> lines;
  std::vector<InstructionSample> accepted;
  for (const auto& o : run.outcomes) {
    lines.push_back(quality::to_json(o));
    if (o.status == quality::OutcomeStatus::kAccepted) accepted.push_back(o.sample);
  }
  json plan = json::object();
  for (const auto& [task, ids] :
       quality::expert_sampling_plan(run.outcomes, c.seed(),
                                     static_cast<std::size_t>(c.get_int("check.review_total")))) {
    plan[std::string(to_string(task))] = ids;
  }
  write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
  write_json(side(io.out, ".stats.json"), quality::to_json(run.stats));
  write_json(side(io.out, ".review.json"), plan);
  write_file_atomic(side(io.out, ".accepted.jsonl"), to_jsonl_of(accepted));
  write_file_atomic(io.out, to_jsonl(lines));

  StageResult r;
  r.counts.in = samples.size();
  r.counts.out = run.stats.total.retained;
  r.counts.dropped = run.stats.total.discarded;
  r.counts.parked = run.stats.total.parked;
  r.agent_failure = !samples.empty() && r.counts.parked == samples.size();
  return r;
}

StageResult run_tiers(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  std::vector<rlhf::Question> questions;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(io.in)) {
    ++line;
    require(j.is_object() && j.contains("id") && j.contains("question") && j["id"].is_string() &&
                j["question"].is_string(),
            io.in.string() + ": record " + std::to_string(line) + " needs string id and question");
    questions.push_back({j["id"].get<std::string>(), j["question"].get<std::string>(),
                         j.value("subdomain", std::string("general"))});
  }
  auto sink = std::make_shared<gateway::TranscriptSink>();
  rlhf::TierAgents agents{make_agent("expert", c, ctx.env, sink),
                          make_agent("write_like_human", c, ctx.env, sink),
                          make_agent("strong", c, ctx.env, sink),
                          make_agent("weak", c, ctx.env, sink)};
  std::vector<RankedAnswerSet> sets;
  try {
    sets = rlhf::generate_ranked_sets(questions, agents,
                                      static_cast<int>(c.get_int("tiers.max_in_flight")));
  } catch (...) {
    write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
    throw;
  }
  write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
  write_file_atomic(io.out, to_jsonl_of(sets));
  StageResult r;
  r.counts.in = questions.size();
  r.counts.out = sets.size();
  return r;
}

StageResult run_pairs(const StageIo& io, const StageContext&) {
  auto sets = read_jsonl_as<RankedAnswerSet>(io.in);
  auto pairs = rlhf::build_preference_pairs(sets);
  write_file_atomic(io.out, to_jsonl_of(pairs));
  StageResult r;
  r.counts.in = sets.size();
  r.counts.out = pairs.size();
  return r;
}

StageResult run_rs_select(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  auto sets = read_jsonl_as<CandidateAnswerSet>(io.in);
  for (const auto& s : sets) {
    validate(s);
    require(!s.candidates.empty(), "candidate set '" + s.question_id + "' is empty");
  }
  const int k = static_cast<int>(c.get_int("rs.k"));
  for (const auto& s : sets) {
    if (static_cast<std::size_t>(k) > s.candidates.size()) {
      throw Error(ErrorCode::kInvalidK, "rs.k=" + std::to_string(k) + " exceeds the " +
                                            std::to_string(s.candidates.size()) +
                                            " candidates of '" + s.question_id + "'");
    }
  }
  auto sink = std::make_shared<gateway::TranscriptSink>();
  rlhf::JudgeScorer scorer(make_agent("judge", c, ctx.env, sink));
  std::vector<CandidateAnswerSet> ranked;
  try {
    ranked = rlhf::rank_all(sets, scorer);
  } catch (...) {
    write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
    throw;
  }
  auto gold = rlhf::select_gold(ranked, k);
  std::vector<json> lines;
  for (const auto& g : gold) lines.push_back(rlhf::to_json(g));
  write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
  write_file_atomic(side(io.out, ".ranked.jsonl"), to_jsonl_of(ranked));
  write_file_atomic(io.out, to_jsonl(lines));
  StageResult r;
  r.counts.in = sets.size();
  r.counts.out = gold.size();
  return r;
}

StageResult run_eval(const StageIo& io, const StageContext& ctx) {
  const Config& c = ctx.config;
  auto items = read_jsonl_as<BenchItem>(io.in);
  auto answers = bench::answers_from_jsonl(read_jsonl(io.extra.at("answers")));
  auto sink = std::make_shared<gateway::TranscriptSink>();
  std::optional<gateway::AgentHandle> judge;
  if (c.get_bool("eval.judge")) judge = make_agent("judge", c, ctx.env, sink);

  bench::EvalOptions opts;
  opts.model = c.get("eval.model");
  opts.judge = judge ? &*judge : nullptr;
  opts.max_in_flight = static_cast<int>(c.get_int("eval.max_in_flight"));
  if (c.has_value("eval.h_grades")) {
    std::istringstream in(c.get("eval.h_grades"));
    std::string part;
    while (std::getline(in, part, ',')) {
      const auto colon = part.find(':');
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      opts.human_grades[parse_bench_kind(trim(part.substr(0, colon)))] = trim(part.substr(colon + 1));
    }
  }
  auto run = bench::evaluate(items, answers, opts);
  std::vector<json> grades;
  for (const auto& g : run.objective) grades.push_back(bench::to_json(g));
  for (const auto& s : run.subjective) grades.push_back(bench::to_json(s));
  write_transcripts(side(io.out, ".transcripts.jsonl"), *sink);
  write_file_atomic(side(io.out, ".grades.jsonl"), to_jsonl(grades));
  write_json(io.out, bench::to_json(run.report));

  StageResult r;
  r.counts.in = items.size();
  std::size_t parked = 0;
  for (const auto& s : run.subjective) parked += s.parked ? 1 : 0;
  r.counts.parked = parked;
  r.counts.out = items.size() - parked;
  r.agent_failure = !run.subjective.empty() && parked == run.subjective.size();
  return r;
}

std::vector<StageDef> build_registry() {
  const std::pair<std::string, std::string> transcripts = {"transcripts", ".transcripts.jsonl"};
  return {
      {"ingest", Kind::kDir, Kind::kCorpus, ".jsonl", {"ingest."}, {}, {{"reports", ".reports.jsonl"}},
       run_ingest},
      {"dedup", Kind::kCorpus, Kind::kCorpus, ".jsonl", {"dedup."}, {}, {{"removals", ".removals.jsonl"}},
       run_dedup},
      {"stats", Kind::kCorpus, Kind::kStats, ".json", {}, {}, {}, run_stats},
      {"refine", Kind::kGraph, Kind::kRefineResult, ".json", {"refine."}, {}, {}, run_refine},
      {"check", Kind::kSamples, Kind::kOutcomes, ".jsonl", {"check.", "agent.check.", "agent.optimize."},
       {},
       {transcripts,
        {"stats", ".stats.json"},
        {"review", ".review.json"},
        {"accepted", ".accepted.jsonl"}},
       run_check},
      {"tiers", Kind::kQuestions, Kind::kRankedSets, ".jsonl",
       {"tiers.", "agent.expert.", "agent.write_like_human.", "agent.strong.", "agent.weak."}, {},
       {transcripts}, run_tiers},
      {"rlhf-pairs", Kind::kRankedSets, Kind::kPairs, ".jsonl", {}, {}, {}, run_pairs},
      {"rs-select", Kind::kCandidates, Kind::kGold, ".jsonl", {"rs.", "agent.judge."}, {},
       {transcripts, {"ranked", ".ranked.jsonl"}}, run_rs_select},
      {"eval", Kind::kBench, Kind::kReport, ".json", {"eval.", "agent.judge."}, {"answers"},
       {transcripts, {"grades", ".grades.jsonl"}}, run_eval},
  };
}

std::vector<FileRef> output_refs(const StageDef& def, const fs::path& out) {
  std::vector<FileRef> refs{{"out", out.string(), ""}};
  for (const auto& [name, suffix] : def.side_outputs) refs.push_back({name, side(out, suffix).string(), ""});
  return refs;
}

}  // namespace

const std::vector<StageDef>& stage_registry() {
  static const std::vector<StageDef> registry = build_registry();
  return registry;
}

const StageDef& find_stage(const std::string& name) {
  for (const auto& s : stage_registry()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kUsage, "unknown stage '" + name + "'");
}

StageRun run_stage(const std::string& name, const StageIo& io, const StageContext& ctx) {
  const StageDef& def = find_stage(name);
  ctx.config.validate();

  std::vector<FileRef> inputs{{"in", io.in.string(), path_digest(io.in)}};
  for (const auto& extra : def.extra_inputs) {
    auto it = io.extra.find(extra);
    if (it == io.extra.end()) {
      throw Error(ErrorCode::kUsage, "stage '" + name + "' needs --" + extra);
    }
    inputs.push_back({extra, it->second.string(), path_digest(it->second)});
  }
  const json config = ctx.config.snapshot(def.config_prefixes);
  auto outputs = output_refs(def, io.out);
  std::vector<std::string> out_paths;
  for (const auto& o : outputs) out_paths.push_back(o.path);
  for (const auto& o : outputs) {
    for (const auto& i : inputs) {
      require(fs::weakly_canonical(o.path) != fs::weakly_canonical(i.path),
              "stage '" + name + "' would overwrite its input " + i.path, ErrorCode::kUsage);
    }
  }

  RunLog log(ctx.run_log);
  if (auto prior = log.find_reusable(name, inputs, config, out_paths)) {
    RunManifest m = *prior;
    m.noop = true;
    m.started_at = m.finished_at = log::utc_timestamp();
    log.append(m);
    log::info("stage " + name + ": inputs unchanged, nothing to do");
    return {m, false};
  }

  RunManifest m;
  m.stage = name;
  m.inputs = inputs;
  m.config = config;
  m.run_id = make_run_id(name, inputs, config);
  m.started_at = log::utc_timestamp();
  if (io.out.has_parent_path()) fs::create_directories(io.out.parent_path());
  StageResult result = def.run(io, ctx);
  for (auto& o : outputs) o.sha256 = path_digest(o.path);
  m.outputs = outputs;
  m.counts = result.counts;
  m.finished_at = log::utc_timestamp();
  log.append(m);
  return {m, result.agent_failure};
}

Plan plan_from_json(const json& j, const fs::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  Plan plan;
  try {
    plan.name = j.value("name", std::string("plan"));
    for (const auto& s : j.at("stages")) {
      PlanStep step;
      step.stage = s.at("stage").get<std::string>();
      if (s.contains("in")) step.in = resolve(s["in"].get<std::string>());
      if (s.contains("out")) step.out = resolve(s["out"].get<std::string>());
      for (const auto& [k, v] : s.items()) {
        if (k != "stage" && k != "in" && k != "out") step.extra[k] = resolve(v.get<std::string>());
      }
      plan.steps.push_back(std::move(step));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("plan: ") + e.what());
  }
  return plan;
}

Plan load_plan(const fs::path& file, const fs::path& base_dir) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIo, e.what());
  }
  auto j = json::parse(text, nullptr, false);
  require(!j.is_discarded() && j.is_object(), "plan " + file.string() + " is not a JSON object",
          ErrorCode::kConfig);
  return plan_from_json(j, base_dir);
}

void check_plan(const Plan& plan) {
  require(!plan.steps.empty(), "plan '" + plan.name + "' has no stages", ErrorCode::kConfig);
  std::optional<Kind> previous;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const StageDef* def = nullptr;
    try {
      def = &find_stage(step.stage);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, "plan step " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!step.in) {
      require(previous.has_value(),
              "plan step " + std::to_string(i + 1) + " (" + step.stage + ") has no input",
              ErrorCode::kConfig);
      require(*previous == def->in,
              "plan step " + std::to_string(i + 1) + " (" + step.stage + ") reads " +
                  std::string(to_string(def->in)) + " but the previous step writes " +
                  std::string(to_string(*previous)),
              ErrorCode::kConfig);
    }
    for (const auto& extra : def->extra_inputs) {
      require(step.extra.count(extra) > 0,
              "plan step " + std::to_string(i + 1) + " (" + step.stage + ") needs \"" + extra + "\"",
              ErrorCode::kConfig);
    }
    previous = def->out;
  }
}

PipelineRun run_pipeline(const Plan& plan, const fs::path& work_dir, const StageContext& ctx) {
  check_plan(plan);
  ctx.config.validate();
  fs::create_directories(work_dir);
  PipelineRun run;
  fs::path previous;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const StageDef& def = find_stage(step.stage);
    char prefix[8];
    std::snprintf(prefix, sizeof(prefix), "%02zu-", i + 1);
    StageIo io;
    io.in = step.in ? *step.in : previous;
    io.out = step.out ? *step.out : work_dir / (prefix + def.name + def.extension);
    io.extra = step.extra;
    log::info("plan " + plan.name + ": step " + std::to_string(i + 1) + " " + def.name);
    StageRun sr = run_stage(step.stage, io, ctx);
    run.stages.push_back(sr);
    run.outputs.push_back(io.out);
    if (sr.agent_failure) {
      throw Error(ErrorCode::kAgent, "stage " + def.name + " parked every item");
    }
    previous = io.out;
  }
  return run;
}

}  // namespace curator::pipeline
