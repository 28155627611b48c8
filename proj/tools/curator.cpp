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

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/log.hpp"
#include "curator/pipeline/stages.hpp"

namespace fs = std::filesystem;
using curator::Error;
using curator::ErrorCode;
namespace pl = curator::pipeline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;
constexpr int kExitAgent = 5;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return kExitUsage;
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidK:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kTemplate:
      return kExitConfig;
    case ErrorCode::kAgent:
    case ErrorCode::kScoringFailed:
    case ErrorCode::kOptimizationFailed:
      return kExitAgent;
    default:
      return kExitIo;  // unreadable or malformed input
  }
}

struct Globals {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;
  std::optional<long long> seed;
  std::optional<std::string> run_log;
  bool verbose = false;
  bool quiet = false;
};

// Options that map onto config keys; only flags the user passed are layered.
struct Flags {
  std::map<std::string, std::string> values;

  template <typename T>
  void add(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<T>();
    cmd->add_option(flag, *holder, help)->each([this, key](const std::string& v) { values[key] = v; });
    holders.push_back(holder);
  }

  std::vector<std::shared_ptr<void>> holders;
};

pl::StageContext make_context(const Globals& g, const Flags& flags, const fs::path& default_log) {
  std::map<std::string, std::string> layered = flags.values;
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kUsage, "--set expects key=value, got '" + kv + "'");
    layered[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (g.seed) layered["seed"] = std::to_string(*g.seed);
  pl::StageContext ctx;
  ctx.env = pl::curator_environment();
  std::optional<fs::path> file;
  if (g.config_file) file = *g.config_file;
  ctx.config = pl::Config::layered(file, layered, ctx.env);
  ctx.run_log = g.run_log ? fs::path(*g.run_log) : default_log;
  return ctx;
}

fs::path log_next_to(const fs::path& out) {
  return (out.has_parent_path() ? out.parent_path() : fs::path(".")) / "manifests.jsonl";
}

void print_manifest(const pl::RunManifest& m) {
  std::cout << m.stage << (m.noop ? " (no-op)" : "") << ": in=" << m.counts.in
            << " out=" << m.counts.out << " dropped=" << m.counts.dropped
            << " parked=" << m.counts.parked << " run_id=" << m.run_id << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain data curation pipeline: ingest, deduplicate, refine, check, and build "
               "preference and benchmark data."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_file, "key = value config file");
  app.add_option("--set", g.sets, "override a config key (key=value), repeatable");
  app.add_option("--seed", g.seed, "seed for every random choice");
  app.add_option("--run-log", g.run_log, "manifest log (default: manifests.jsonl beside the output)");
  app.add_flag("-v,--verbose", g.verbose, "debug logging");
  app.add_flag("-q,--quiet", g.quiet, "warnings and errors only");

  std::string in, out, answers, plan_file, work_dir, base_dir = ".";
  auto stage_cmd = [&](const std::string& name, const std::string& help, bool needs_out = true) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--in", in, "input path")->required();
    auto* o = cmd->add_option("--out", out, "output path");
    if (needs_out) o->required();
    return cmd;
  };

  Flags flags;
  auto* ingest = stage_cmd("ingest", "load a directory of markdown/text into a filtered corpus");
  flags.add<std::string>(ingest, "--source", "ingest.source", "OAP, OAJP, SP, DMT_AC, IEAD or synthetic");
  flags.add<std::string>(ingest, "--subdomain", "ingest.subdomain", "subdomain label");
  flags.add<std::string>(ingest, "--filter-policy", "ingest.filter_policy", "filter policy JSON");

  auto* dedup = stage_cmd("dedup", "remove near-duplicate documents");
  flags.add<double>(dedup, "--epsilon", "dedup.epsilon", "cosine-distance radius");
  flags.add<int>(dedup, "--k", "dedup.k", "k-means clusters (default ceil(n/1000))");
  flags.add<std::string>(dedup, "--keep", "dedup.keep", "longest_text or lowest_id");
  flags.add<std::string>(dedup, "--embedding", "dedup.embedding", "hash or remote");

  auto* refine = stage_cmd("refine", "select core papers from a citation graph");
  flags.add<double>(refine, "--percentile", "refine.percentile", "local citation percentile");
  flags.add<double>(refine, "--dbscan-eps", "refine.dbscan_epsilon", "DBSCAN radius");
  flags.add<int>(refine, "--min-pts", "refine.min_pts", "DBSCAN minimum points");
  flags.add<int>(refine, "--m-k", "refine.m_k", "papers kept per cluster");
  flags.add<int>(refine, "--target-size", "refine.target_size", "pick m_k in 5..15 to approach this size");
  flags.add<std::string>(refine, "--eps-mode", "refine.eps_mode", "distance or similarity");

  auto* check = stage_cmd("check", "score and repair instruction samples");
  flags.add<double>(check, "--threshold", "check.threshold", "acceptance threshold (0-10)");
  flags.add<int>(check, "--max-rounds", "check.max_rounds", "score/optimize rounds per sample");
  flags.add<std::string>(check, "--mode", "check.threshold_mode", "all_dims or mean");

  stage_cmd("tiers", "generate four tiered answers per question");
  stage_cmd("rlhf-pairs", "build adjacent-tier preference pairs");
  auto* rs = stage_cmd("rs-select", "rank candidates and keep the top k per question");
  flags.add<int>(rs, "--k", "rs.k", "answers kept per question");

  auto* eval = app.add_subcommand("eval", "grade model answers against a benchmark");
  eval->add_option("--bench", in, "benchmark items JSONL")->required();
  eval->add_option("--answers", answers, "model answers JSONL")->required();
  eval->add_option("--out", out, "report JSON")->required();
  flags.add<std::string>(eval, "--model", "eval.model", "model name for the report");
  flags.add<std::string>(eval, "--judge", "eval.judge", "judge subjective items (true/false)");

  auto* pipeline = app.add_subcommand("pipeline", "run a plan of stages");
  pipeline->add_option("--plan", plan_file, "plan JSON")->required();
  pipeline->add_option("--work", work_dir, "directory for stage outputs")->required();
  pipeline->add_option("--base-dir", base_dir, "resolve relative plan paths against this directory");

  stage_cmd("stats", "corpus statistics by source", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (g.verbose) curator::log::set_level(curator::log::Level::kDebug);
  if (g.quiet) curator::log::set_level(curator::log::Level::kWarn);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "pipeline") {
      auto ctx = make_context(g, flags, fs::path(work_dir) / "manifests.jsonl");
      auto plan = pl::load_plan(plan_file, base_dir);
      auto run = pl::run_pipeline(plan, work_dir, ctx);
      for (const auto& s : run.stages) print_manifest(s.manifest);
      return kExitOk;
    }
    if (name == "stats" && out.empty()) {
      curator::Corpus corpus;
      corpus.documents = curator::read_jsonl_as<curator::Document>(in);
      corpus = curator::recompute_stats(std::move(corpus));
      std::cout << nlohmann::json(corpus.stats).dump(2) << "\n";
      return kExitOk;
    }
    auto ctx = make_context(g, flags, log_next_to(out));
    pl::StageIo io;
    io.in = in;
    io.out = out;
    if (name == "eval") io.extra["answers"] = answers;
    auto run = pl::run_stage(name, io, ctx);
    print_manifest(run.manifest);
    if (run.agent_failure) {
      std::cerr << "error: every item was parked after agent failures\n";
      return kExitAgent;
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
