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

#include <map>
#include <optional>
#include <string>

namespace curator::ingest {

enum class DropReason { kPii, kHarmful, kGarbled };

std::string_view to_string(DropReason r);

struct NormalizationReport {
  int images_reduced = 0;
  int tables_converted = 0;
  int formulas_converted = 0;
  int citations_annotated = 0;
  std::optional<DropReason> dropped_reason;

  bool all_zero() const {
    return images_reduced == 0 && tables_converted == 0 && formulas_converted == 0 &&
           citations_annotated == 0;
  }
  bool operator==(const NormalizationReport&) const = default;
};

// Citation key -> page (or page range) of the referenced work.
using Bibliography = std::map<std::string, std::string>;

struct NormalizedText {
  std::string text;
  NormalizationReport report;
};

// Structural normalization of extracted text:
//  - images: markup and inline payloads are removed; a caption that follows
//    is kept, otherwise non-empty alt text stands in as the caption;
//  - tables: HTML and tab-separated blocks become pipe tables;
//  - formulas: \( \), \[ \] and equation-like environments become $ / $$
//    spans with the body untouched;
//  - citations: \cite{...} and [@...] become `[ref: key, p. N]` when the
//    bibliography has a page for the key, else `[ref: key]`.
// Fenced code blocks pass through untouched. Idempotent.
NormalizedText normalize_markdown(const std::string& raw, const Bibliography* bib = nullptr);

// Counts inline image payloads and image markup (markdown, HTML, data URIs).
int count_image_payloads(const std::string& text);

}  // namespace curator::ingest
