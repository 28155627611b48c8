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

// JSON encodings for the core types. Field names are snake_case and match the
// struct members. Decoding is strict: missing required fields and invalid enum
// names throw Error(kValidation).

#include <json.hpp>

#include "curator/core/types.hpp"

namespace curator {

using Json = nlohmann::json;

void to_json(Json& j, const Document& v);
void from_json(const Json& j, Document& v);

void to_json(Json& j, const CorpusStats& v);

void to_json(Json& j, const CitationEdge& v);
void from_json(const Json& j, CitationEdge& v);

void to_json(Json& j, const InstructionSample& v);
void from_json(const Json& j, InstructionSample& v);

void to_json(Json& j, const QualityReport& v);
QualityReport quality_report_from_json(const Json& j);

void to_json(Json& j, const TieredAnswer& v);
void from_json(const Json& j, TieredAnswer& v);

void to_json(Json& j, const RankedAnswerSet& v);
void from_json(const Json& j, RankedAnswerSet& v);

void to_json(Json& j, const PreferencePair& v);
void from_json(const Json& j, PreferencePair& v);

void to_json(Json& j, const CandidateAnswerSet& v);
void from_json(const Json& j, CandidateAnswerSet& v);

void to_json(Json& j, const BenchOption& v);
void from_json(const Json& j, BenchOption& v);

void to_json(Json& j, const BenchItem& v);
void from_json(const Json& j, BenchItem& v);

// Graph file: optional {"node": id} lines plus {"citer", "cited"} edge lines.
// Nodes mentioned only by edges are added in first-seen order.
CitationGraph citation_graph_from_jsonl_lines(const std::vector<Json>& lines);
std::vector<Json> citation_graph_to_jsonl_lines(const CitationGraph& graph);

}  // namespace curator

namespace nlohmann {

template <>
struct adl_serializer<curator::QualityReport> {
  static curator::QualityReport from_json(const json& j) {
    return curator::quality_report_from_json(j);
  }
  static void to_json(json& j, const curator::QualityReport& v) {
    curator::to_json(j, v);
  }
};

}  // namespace nlohmann
