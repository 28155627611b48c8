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

#include "curator/core/codec.hpp"

#include <unordered_set>

#include "curator/core/error.hpp"

namespace curator {

namespace {

const Json& field(const Json& j, const char* key) {
  require(j.is_object(), std::string("expected a JSON object while reading '") + key + "'");
  auto it = j.find(key);
  require(it != j.end(), std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  require(v.is_string(), std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  require(it->is_string(), std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

void to_json(Json& j, const Document& v) {
  j = Json{{"id", v.id},
           {"source", to_string(v.source)},
           {"subdomain", v.subdomain},
           {"text", v.text},
           {"token_count", v.token_count},
           {"meta", v.meta}};
}

void from_json(const Json& j, Document& v) {
  v.id = string_field(j, "id");
  v.source = parse_source(string_field(j, "source"));
  v.subdomain = string_field(j, "subdomain");
  v.text = string_field(j, "text");
  const Json& tc = field(j, "token_count");
  require(tc.is_number_unsigned() || (tc.is_number_integer() && tc.get<long long>() >= 0),
          "token_count must be a nonnegative integer");
  v.token_count = tc.get<std::uint64_t>();
  v.meta.clear();
  if (auto it = j.find("meta"); it != j.end() && !it->is_null()) {
    require(it->is_object(), "meta must be an object");
    for (const auto& [k, val] : it->items()) {
      v.meta[k] = val.is_string() ? val.get<std::string>() : val.dump();
    }
  }
}

void to_json(Json& j, const CorpusStats& v) {
  Json by_source = Json::object();
  for (auto s : kAllSources) {
    auto it = v.by_source.find(s);
    SourceStats st = it == v.by_source.end() ? SourceStats{} : it->second;
    by_source[std::string(to_string(s))] = {{"documents", st.documents},
                                            {"tokens", st.tokens}};
  }
  j = Json{{"by_source", by_source},
           {"documents", v.documents},
           {"tokens", v.tokens}};
}

void to_json(Json& j, const CitationEdge& v) {
  j = Json{{"citer", v.citer}, {"cited", v.cited}};
}

void from_json(const Json& j, CitationEdge& v) {
  v.citer = string_field(j, "citer");
  v.cited = string_field(j, "cited");
}

void to_json(Json& j, const InstructionSample& v) {
  j = Json::object();
  if (!v.id.empty()) j["id"] = v.id;
  j["instruction"] = v.instruction;
  j["input"] = v.input;
  j["output"] = v.output;
  j["task"] = to_string(v.task);
  j["subdomain"] = v.subdomain;
  j["provenance"] = to_string(v.provenance);
}

void from_json(const Json& j, InstructionSample& v) {
  v.id = optional_string(j, "id");
  v.instruction = string_field(j, "instruction");
  v.input = optional_string(j, "input");
  v.output = string_field(j, "output");
  v.task = parse_task(string_field(j, "task"));
  v.subdomain = optional_string(j, "subdomain");
  auto prov = optional_string(j, "provenance");
  v.provenance = prov.empty() ? Provenance::kSeed : parse_provenance(prov);
  validate(v);
}

void to_json(Json& j, const QualityReport& v) {
  Json scores = Json::object();
  Json reasons = Json::object();
  for (auto d : kAllDimensions) {
    scores[std::string(to_string(d))] = v.score(d);
    auto it = v.reasons().find(d);
    reasons[std::string(to_string(d))] = it == v.reasons().end() ? "" : it->second;
  }
  j = Json{{"scores", scores}, {"reasons", reasons}, {"round", v.round()}};
}

QualityReport quality_report_from_json(const Json& j) {
  QualityReport::Scores scores;
  QualityReport::Reasons reasons;
  const Json& s = field(j, "scores");
  require(s.is_object(), "scores must be an object");
  for (const auto& [k, val] : s.items()) {
    require(val.is_number(), "score '" + k + "' must be a number");
    scores[parse_dimension(k)] = val.get<double>();
  }
  if (auto it = j.find("reasons"); it != j.end() && it->is_object()) {
    for (const auto& [k, val] : it->items()) {
      reasons[parse_dimension(k)] = val.is_string() ? val.get<std::string>() : val.dump();
    }
  }
  const Json& r = field(j, "round");
  require(r.is_number_integer(), "round must be an integer");
  return QualityReport(std::move(scores), std::move(reasons), r.get<int>());
}

void to_json(Json& j, const TieredAnswer& v) {
  j = Json{{"tier", to_string(v.tier)}, {"text", v.text}};
}

void from_json(const Json& j, TieredAnswer& v) {
  v.tier = parse_tier(string_field(j, "tier"));
  v.text = string_field(j, "text");
}

void to_json(Json& j, const RankedAnswerSet& v) {
  j = Json{{"question_id", v.question_id},
           {"question", v.question},
           {"tiered_answers", v.tiered_answers}};
}

void from_json(const Json& j, RankedAnswerSet& v) {
  v.question_id = string_field(j, "question_id");
  v.question = string_field(j, "question");
  const Json& ans = field(j, "tiered_answers");
  require(ans.is_array(), "tiered_answers must be an array");
  v.tiered_answers.clear();
  for (const auto& a : ans) v.tiered_answers.push_back(a.get<TieredAnswer>());
}

void to_json(Json& j, const PreferencePair& v) {
  j = Json{{"question_id", v.question_id},
           {"prompt", v.prompt},
           {"chosen", v.chosen},
           {"rejected", v.rejected},
           {"pair_rank", v.pair_rank}};
}

void from_json(const Json& j, PreferencePair& v) {
  v.question_id = string_field(j, "question_id");
  v.prompt = string_field(j, "prompt");
  v.chosen = string_field(j, "chosen");
  v.rejected = string_field(j, "rejected");
  const Json& r = field(j, "pair_rank");
  require(r.is_number_integer(), "pair_rank must be an integer");
  v.pair_rank = r.get<int>();
  validate(v);
}

void to_json(Json& j, const CandidateAnswerSet& v) {
  j = Json{{"question_id", v.question_id},
           {"question", v.question},
           {"candidates", v.candidates}};
  if (v.scores) j["scores"] = *v.scores;
}

void from_json(const Json& j, CandidateAnswerSet& v) {
  v.question_id = string_field(j, "question_id");
  v.question = string_field(j, "question");
  const Json& c = field(j, "candidates");
  require(c.is_array(), "candidates must be an array");
  v.candidates.clear();
  for (const auto& s : c) {
    require(s.is_string(), "candidates must be strings");
    v.candidates.push_back(s.get<std::string>());
  }
  v.scores.reset();
  if (auto it = j.find("scores"); it != j.end() && !it->is_null()) {
    require(it->is_array(), "scores must be an array");
    std::vector<double> scores;
    for (const auto& s : *it) {
      require(s.is_number(), "scores must be numbers");
      scores.push_back(s.get<double>());
    }
    v.scores = std::move(scores);
  }
  validate(v);
}

void to_json(Json& j, const BenchOption& v) {
  j = Json{{"label", v.label}, {"text", v.text}};
}

void from_json(const Json& j, BenchOption& v) {
  v.label = string_field(j, "label");
  v.text = optional_string(j, "text");
}

void to_json(Json& j, const BenchItem& v) {
  j = Json{{"id", v.id}, {"kind", to_string(v.kind)}, {"stem", v.stem}};
  if (!v.options.empty()) j["options"] = v.options;
  if (is_objective_kind(v.kind)) {
    j["gold"] = v.gold.labels;
  } else {
    j["gold"] = v.gold.reference;
  }
}

void from_json(const Json& j, BenchItem& v) {
  v.id = string_field(j, "id");
  v.kind = parse_bench_kind(string_field(j, "kind"));
  v.stem = string_field(j, "stem");
  v.options.clear();
  if (auto it = j.find("options"); it != j.end() && !it->is_null()) {
    require(it->is_array(), "options must be an array");
    for (const auto& o : *it) v.options.push_back(o.get<BenchOption>());
  }
  v.gold = {};
  const Json& g = field(j, "gold");
  if (g.is_array()) {
    for (const auto& s : g) {
      require(s.is_string(), "gold labels must be strings");
      v.gold.labels.push_back(s.get<std::string>());
    }
  } else if (g.is_boolean()) {
    v.gold.labels.push_back(g.get<bool>() ? "true" : "false");
  } else {
    require(g.is_string(), "gold must be a label array or reference text");
    if (is_objective_kind(v.kind)) {
      v.gold.labels.push_back(g.get<std::string>());
    } else {
      v.gold.reference = g.get<std::string>();
    }
  }
  validate(v);
}

CitationGraph citation_graph_from_jsonl_lines(const std::vector<Json>& lines) {
  CitationGraph g;
  std::unordered_set<std::string> seen;
  auto add_node = [&](const std::string& id) {
    if (seen.insert(id).second) g.nodes.push_back(id);
  };
  for (const auto& line : lines) {
    require(line.is_object(), "graph line must be an object");
    if (line.contains("node")) {
      add_node(string_field(line, "node"));
    } else if (line.contains("nodes")) {
      for (const auto& n : line["nodes"]) add_node(n.get<std::string>());
    } else {
      auto e = line.get<CitationEdge>();
      add_node(e.citer);
      add_node(e.cited);
      g.edges.push_back(std::move(e));
    }
  }
  validate(g);
  return g;
}

std::vector<Json> citation_graph_to_jsonl_lines(const CitationGraph& graph) {
  std::vector<Json> out;
  out.reserve(graph.nodes.size() + graph.edges.size());
  for (const auto& n : graph.nodes) out.push_back(Json{{"node", n}});
  for (const auto& e : graph.edges) out.emplace_back(e);
  return out;
}

}  // namespace curator
