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

#include <sys/wait.h>

#include <cstdlib>

#include "curator/core/jsonl.hpp"
#include "support.hpp"

namespace curator {
namespace {

// Runs the CLI with cwd at the source root, output captured to `log`.
int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = "cd '" + testing::source_dir().string() + "' && '" + CURATOR_BIN + "' " +
                          args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, DedupThenNoopRerun) {
  testing::TempDir dir;
  const auto out = dir / "dedup.jsonl";
  const std::string args = "dedup --in fixtures/dedup/corpus.jsonl --out '" + out.string() + "'";
  ASSERT_EQ(run_cli(args, dir / "1.log"), 0) << read_file(dir / "1.log");
  EXPECT_NE(read_file(dir / "1.log").find("dedup: in=20 out=15 dropped=5"), std::string::npos);
  ASSERT_EQ(run_cli(args, dir / "2.log"), 0);
  EXPECT_NE(read_file(dir / "2.log").find("dedup (no-op)"), std::string::npos);
  EXPECT_EQ(read_jsonl(dir / "manifests.jsonl").size(), 2u);
}

TEST(Cli, UsageErrors) {
  testing::TempDir dir;
  EXPECT_EQ(run_cli("", dir / "a.log"), 2);
  EXPECT_EQ(run_cli("compress --in x --out y", dir / "b.log"), 2);
  EXPECT_EQ(run_cli("dedup --out y", dir / "c.log"), 2);
}

TEST(Cli, ConfigErrors) {
  testing::TempDir dir;
  EXPECT_EQ(run_cli("rs-select --in fixtures/candidates.jsonl --k 9 --out '" +
                        (dir / "g.jsonl").string() + "'",
                    dir / "a.log"),
            3);
  EXPECT_EQ(run_cli("--set dedup.nope=1 dedup --in fixtures/dedup/corpus.jsonl --out '" +
                        (dir / "d.jsonl").string() + "'",
                    dir / "b.log"),
            3);
}

TEST(Cli, MissingInputIsIoError) {
  testing::TempDir dir;
  EXPECT_EQ(run_cli("dedup --in fixtures/none.jsonl --out '" + (dir / "d.jsonl").string() + "'",
                    dir / "a.log"),
            4);
}

TEST(Cli, AgentOutageExitsFive) {
  testing::TempDir dir;
  const std::string args = "check --in fixtures/samples.jsonl --out '" +
                           (dir / "o.jsonl").string() + "'";
  // Port 9 on localhost refuses connections; keep retries short.
  const std::string env =
      "CURATOR_CHECK_BASE_URL=http://127.0.0.1:9 CURATOR_AGENT_CHECK_MAX_ATTEMPTS=1 "
      "CURATOR_AGENT_CHECK_TIMEOUT_MS=500 ";
  const std::string cmd = "cd '" + testing::source_dir().string() + "' && " + env + "'" +
                          CURATOR_BIN + "' " + args + " > '" + (dir / "a.log").string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(rc));
  EXPECT_EQ(WEXITSTATUS(rc), 5) << read_file(dir / "a.log");
}

TEST(Cli, EvalWritesReport) {
  testing::TempDir dir;
  const auto out = dir / "report.json";
  ASSERT_EQ(run_cli("eval --bench fixtures/bench/items.jsonl --answers fixtures/bench/answers.jsonl "
                    "--out '" + out.string() + "'",
                    dir / "a.log"),
            0)
      << read_file(dir / "a.log");
  auto report = nlohmann::json::parse(read_file(out));
  EXPECT_TRUE(report.contains("objective_average"));
  EXPECT_TRUE(report.contains("Q&A"));
}

TEST(Cli, StatsToStdout) {
  testing::TempDir dir;
  ASSERT_EQ(run_cli("stats --in fixtures/dedup/corpus.jsonl", dir / "a.log"), 0);
  auto stats = nlohmann::json::parse(read_file(dir / "a.log"));
  EXPECT_EQ(stats["documents"].get<int>(), 20);
}

}  // namespace
}  // namespace curator
