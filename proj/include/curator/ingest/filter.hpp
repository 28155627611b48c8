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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/core/types.hpp"
#include "curator/ingest/normalize.hpp"

namespace curator::ingest {

struct FilterPolicy {
  // ECMAScript regexes; every match counts toward the PII total.
  std::vector<std::string> pii_patterns;
  // Drop when the PII match count exceeds this.
  int pii_max_matches = 3;
  // Case-insensitive whole-word terms.
  std::vector<std::string> blocklist;
  double min_printable = 0.90;
  double min_alnum = 0.40;

  static FilterPolicy defaults();
};

FilterPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FilterPolicy& policy);

struct TextRatios {
  double printable = 0.0;  // printable code points / all code points
  double alnum = 0.0;      // letters and digits / non-space code points
};

TextRatios text_ratios(const std::string& text);

int count_pii_matches(const std::string& text, const FilterPolicy& policy);
int count_blocklist_matches(const std::string& text, const FilterPolicy& policy);

struct FilterDecision {
  bool keep = true;
  std::optional<DropReason> reason;
  std::string detail;
};

// Rules are tried in order pii, harmful, garbled; the first that fires wins.
FilterDecision filter_content(const Document& doc, const FilterPolicy& policy);

}  // namespace curator::ingest
