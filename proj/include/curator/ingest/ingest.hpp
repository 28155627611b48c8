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
#include <string>
#include <vector>

#include "curator/core/tokenizer.hpp"
#include "curator/core/types.hpp"
#include "curator/ingest/filter.hpp"
#include "curator/ingest/normalize.hpp"

namespace curator::ingest {

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct DocumentReport {
  std::string doc_id;
  NormalizationReport report;
};

struct IngestResult {
  Corpus corpus;
  std::vector<DocumentReport> reports;  // aligned with corpus.documents
  std::vector<SkippedFile> skipped;
};

struct IngestOptions {
  const TokenCounter* tokens = nullptr;  // default whitespace counter
  bool normalize = true;
};

// Loads every .md/.txt file under `root` (recursively), ordered by relative
// path. The id of a document is its relative path. A sidecar
// `<file>.meta.json` may carry {"meta": {...}, "bibliography": {key: page}};
// other top-level string fields are merged into meta. Files that are not
// valid UTF-8 or contain NUL bytes are skipped and logged. Throws
// Error(kIo) when root is missing or unreadable.
IngestResult ingest_directory(const std::filesystem::path& root, Source source,
                              const std::string& subdomain, const IngestOptions& options = {});

struct FilteredCorpus {
  Corpus kept;
  std::vector<DocumentReport> reports;  // every input doc; dropped_reason set when dropped
  std::vector<std::pair<std::string, FilterDecision>> dropped;
};

// Applies filter_content to each document. `reports` may be empty, in which
// case fresh reports are created.
FilteredCorpus apply_filter(const Corpus& corpus, const std::vector<DocumentReport>& reports,
                            const FilterPolicy& policy);

nlohmann::json to_json(const DocumentReport& r);

}  // namespace curator::ingest
