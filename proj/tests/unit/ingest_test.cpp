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

#include <fstream>
#include <regex>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/utf8.hpp"
#include "curator/ingest/filter.hpp"
#include "curator/ingest/ingest.hpp"
#include "curator/ingest/normalize.hpp"
#include "support.hpp"

namespace curator::ingest {
namespace {

namespace fs = std::filesystem;

TEST(Normalize, KeepsCaptionDropsImage) {
  auto r = normalize_markdown("text ![fig](x.png) Figure 1: A grid.");
  EXPECT_EQ(r.text, "text Figure 1: A grid.");
  EXPECT_EQ(r.report.images_reduced, 1);
}

TEST(Normalize, PlainTextIsUnchanged) {
  const std::string plain = "Wind output varies with the cube of speed.\n\nNo markup here.\n";
  auto r = normalize_markdown(plain);
  EXPECT_EQ(r.text, plain);
  EXPECT_TRUE(r.report.all_zero());
}

TEST(Normalize, AltTextStandsInWithoutCaption) {
  auto r = normalize_markdown("Before ![load curve](c.png)\n\nAfter.");
  EXPECT_NE(r.text.find("load curve"), std::string::npos);
  EXPECT_EQ(r.text.find("c.png"), std::string::npos);
}

TEST(Normalize, AnnotatedFixtureCounts) {
  const auto raw = read_file(testing::fixture("normalize/annotated.md"));
  const auto expected = nlohmann::json::parse(read_file(testing::fixture(
      "normalize/annotated.counts.json")));
  auto r = normalize_markdown(raw);
  EXPECT_EQ(r.report.images_reduced, expected["images"].get<int>());
  EXPECT_EQ(r.report.tables_converted, expected["tables"].get<int>());
  EXPECT_EQ(r.report.formulas_converted, expected["formulas"].get<int>());
  EXPECT_EQ(r.report.citations_annotated, expected["citations"].get<int>());
  EXPECT_EQ(count_image_payloads(r.text), 0);
  EXPECT_EQ(r.text.find("data:image"), std::string::npos);
  EXPECT_NE(r.text.find("| Chemistry | Cycles |"), std::string::npos);
  EXPECT_NE(r.text.find("| Hornsdale | 194 | 2017 |"), std::string::npos);
  EXPECT_NE(r.text.find("$Q(t) = Q_0 (1 - k\\sqrt{t})$"), std::string::npos);
}

TEST(Normalize, IsIdempotent) {
  const auto raw = read_file(testing::fixture("normalize/annotated.md"));
  auto once = normalize_markdown(raw);
  auto twice = normalize_markdown(once.text);
  EXPECT_EQ(twice.text, once.text);
  EXPECT_TRUE(twice.report.all_zero());
}

TEST(Normalize, CodeFencesPassThrough) {
  const std::string raw = "```\n![x](y.png) \\(a\\) \\cite{k}\n```\n";
  auto r = normalize_markdown(raw);
  EXPECT_EQ(r.text, raw);
  EXPECT_TRUE(r.report.all_zero());
}

TEST(Normalize, CitationsUseBibliographyPages) {
  Bibliography bib{{"kundur1994", "128"}};
  auto r = normalize_markdown("Inertia \\cite{kundur1994} and droop [@other].", &bib);
  EXPECT_EQ(r.text, "Inertia [ref: kundur1994, p. 128] and droop [ref: other].");
  EXPECT_EQ(r.report.citations_annotated, 2);
}

TEST(Normalize, DisplayMathEnvironments) {
  auto r = normalize_markdown("\\begin{align}a &= b\\end{align} and \\[x\\]");
  EXPECT_EQ(r.text, "$$\\begin{align}a &= b\\end{align}$$ and $$x$$");
  EXPECT_EQ(r.report.formulas_converted, 2);
}

Document text_doc(std::string text) {
  Document d;
  d.id = "d";
  d.text = std::move(text);
  return d;
}

TEST(Filter, CleanProseIsKept) {
  auto d = filter_content(text_doc("Pumped hydro stores energy by moving water uphill."),
                          FilterPolicy::defaults());
  EXPECT_TRUE(d.keep);
}

TEST(Filter, ReplacementCharactersAreGarbled) {
  std::string text;
  for (int i = 0; i < 6; ++i) text += "\xEF\xBF\xBD";
  text += "abcd";
  auto d = filter_content(text_doc(text), FilterPolicy::defaults());
  EXPECT_FALSE(d.keep);
  EXPECT_EQ(d.reason, DropReason::kGarbled);
}

TEST(Filter, PlantedEmailsExceedThreshold) {
  const std::string text =
      "Contacts: ana@grid.example.org, bo@utility.example.com, cy@iso.example.net, "
      "di@plant.example.io and ed@lab.example.edu for the outage review.";
  const std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  const auto oracle = std::distance(std::sregex_iterator(text.begin(), text.end(), email),
                                    std::sregex_iterator());
  ASSERT_EQ(oracle, 5);
  auto policy = FilterPolicy::defaults();
  ASSERT_EQ(policy.pii_max_matches, 3);
  EXPECT_EQ(count_pii_matches(text, policy), oracle);
  auto d = filter_content(text_doc(text), policy);
  EXPECT_FALSE(d.keep);
  EXPECT_EQ(d.reason, DropReason::kPii);
}

TEST(Filter, ThresholdIsInclusiveKeep) {
  auto d = filter_content(text_doc("a@b.example.com c@d.example.com e@f.example.com wrote."),
                          FilterPolicy::defaults());
  EXPECT_TRUE(d.keep);
}

TEST(Filter, BlocklistIsWholeWordCaseInsensitive) {
  auto policy = FilterPolicy::defaults();
  policy.blocklist = {"sabotage"};
  EXPECT_EQ(count_blocklist_matches("Plans for SABOTAGE of a substation.", policy), 1);
  EXPECT_EQ(count_blocklist_matches("antisabotage measures", policy), 0);
  EXPECT_EQ(filter_content(text_doc("Plans for SABOTAGE."), policy).reason, DropReason::kHarmful);
}

TEST(Filter, PolicyRoundTripsAndMatchesShippedFile) {
  auto p = FilterPolicy::defaults();
  auto j = to_json(p);
  EXPECT_EQ(to_json(policy_from_json(j)), j);
  auto shipped = nlohmann::json::parse(read_file(testing::source_dir() / "config/filter_policy.json"));
  EXPECT_EQ(shipped, j);
}

TEST(Ingest, EmptyDirectory) {
  testing::TempDir dir;
  auto r = ingest_directory(dir.path(), Source::kOAP, "general");
  EXPECT_TRUE(r.corpus.documents.empty());
}

TEST(Ingest, OrdersByRelativePath) {
  testing::TempDir dir;
  write_file_atomic(dir / "b.md", "second");
  write_file_atomic(dir / "a.md", "first");
  write_file_atomic(dir / "c.pdf", "ignored");
  auto r = ingest_directory(dir.path(), Source::kOAP, "general");
  ASSERT_EQ(r.corpus.documents.size(), 2u);
  EXPECT_EQ(r.corpus.documents[0].id, "a.md");
  EXPECT_EQ(r.corpus.documents[1].id, "b.md");
}

TEST(Ingest, MissingRootIsIoError) {
  try {
    ingest_directory("/nonexistent/curator", Source::kOAP, "general");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Ingest, FixtureTreeMatchesIndependentWalk) {
  const auto root = testing::fixture("docs");
  std::size_t loadable = 0;
  std::size_t bad = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext != ".md" && ext != ".txt") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    if (bytes.find('\0') != std::string::npos || !is_valid_utf8(bytes)) {
      ++bad;
    } else {
      ++loadable;
    }
  }
  auto r = ingest_directory(root, Source::kOAP, "general");
  EXPECT_EQ(r.corpus.documents.size(), loadable);
  EXPECT_EQ(r.skipped.size(), bad);
  EXPECT_EQ(bad, 2u);
  EXPECT_EQ(r.reports.size(), r.corpus.documents.size());
  for (const auto& d : r.corpus.documents) EXPECT_NO_THROW(validate(d));
}

TEST(Ingest, SidecarMetadataAndCitations) {
  auto r = ingest_directory(testing::fixture("docs"), Source::kOAP, "general");
  const Document* grid = nullptr;
  for (const auto& d : r.corpus.documents) {
    if (d.id == "power_systems/grid_frequency.md") grid = &d;
  }
  ASSERT_NE(grid, nullptr);
  EXPECT_TRUE(grid->meta.count("title"));
  EXPECT_NE(grid->text.find("[ref: kundur1994, p. 128]"), std::string::npos);
  EXPECT_GT(grid->token_count, 0u);
}

TEST(Ingest, FilterDropsPlantedDocuments) {
  auto loaded = ingest_directory(testing::fixture("docs"), Source::kOAP, "general");
  auto f = apply_filter(loaded.corpus, loaded.reports, FilterPolicy::defaults());
  std::map<std::string, DropReason> dropped;
  for (const auto& [id, d] : f.dropped) dropped[id] = *d.reason;
  EXPECT_EQ(dropped.at("markets/contact_list.md"), DropReason::kPii);
  EXPECT_EQ(dropped.at("markets/sabotage.md"), DropReason::kHarmful);
  EXPECT_EQ(dropped.at("misc/garbled.txt"), DropReason::kGarbled);
  EXPECT_EQ(f.kept.documents.size() + f.dropped.size(), loaded.corpus.documents.size());
  EXPECT_EQ(f.reports.size(), loaded.corpus.documents.size());
}

}  // namespace
}  // namespace curator::ingest
