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

#include "curator/bench/grading.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "curator/core/error.hpp"
#include "curator/core/parallel.hpp"

namespace curator::bench {

using nlohmann::json;

std::string_view to_string(CreditDetail d) {
  switch (d) {
    case CreditDetail::kFull: return "full";
    case CreditDetail::kPartial: return "partial";
    case CreditDetail::kZero: return "zero";
  }
  return "zero";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

GradingResult make(const BenchItem& item, double credit) {
  GradingResult r;
  r.item_id = item.id;
  r.kind = item.kind;
  r.credit = credit;
  r.detail = credit >= 1.0 ? CreditDetail::kFull
             : credit <= 0.0 ? CreditDetail::kZero
                             : CreditDetail::kPartial;
  return r;
}

void expect_kind(const BenchItem& item, BenchKind kind) {
  require(item.kind == kind, "item '" + item.id + "' is " + std::string(to_string(item.kind)) +
                                 ", not " + std::string(to_string(kind)),
          ErrorCode::kInvalidArgument);
}

bool is_option(const BenchItem& item, const std::string& label) {
  return std::any_of(item.options.begin(), item.options.end(),
                     [&](const BenchOption& o) { return o.label == label; });
}

// Resolves case differences against the item's labels ("c" -> "C").
std::string canonical_label(const BenchItem& item, const std::string& raw) {
  const std::string t = trim(raw);
  if (is_option(item, t)) return t;
  for (const auto& o : item.options) {
    if (lower(o.label) == lower(t)) return o.label;
  }
  return t;
}

}  // namespace

json to_json(const GradingResult& r) {
  return {{"item_id", r.item_id},
          {"kind", std::string(to_string(r.kind))},
          {"credit", r.credit},
          {"detail", std::string(to_string(r.detail))},
          {"flags", r.flags}};
}

GradingResult grade_single_choice(const BenchItem& item, const std::string& answer) {
  expect_kind(item, BenchKind::kSingleChoice);
  const std::string label = canonical_label(item, answer);
  if (!is_option(item, label)) {
    auto r = make(item, 0.0);
    r.flags.push_back(label.empty() ? "empty" : "invalid");
    return r;
  }
  return make(item, label == item.gold.labels.at(0) ? 1.0 : 0.0);
}

GradingResult grade_multiple_choice(const BenchItem& item,
                                    const std::vector<std::string>& answers) {
  expect_kind(item, BenchKind::kMultipleChoice);
  std::set<std::string> chosen;
  bool invalid = false;
  for (const auto& a : answers) {
    const std::string label = canonical_label(item, a);
    if (label.empty()) continue;
    if (!is_option(item, label)) invalid = true;
    chosen.insert(label);
  }
  if (chosen.empty()) {
    auto r = make(item, 0.0);
    r.flags.push_back("empty");
    return r;
  }
  const std::set<std::string> gold(item.gold.labels.begin(), item.gold.labels.end());
  for (const auto& c : chosen) {
    if (!gold.count(c)) {
      auto r = make(item, 0.0);
      if (invalid) r.flags.push_back("invalid");
      return r;
    }
  }
  return make(item, static_cast<double>(chosen.size()) / static_cast<double>(gold.size()));
}

std::optional<bool> parse_boolean_label(const std::string& answer) {
  std::string t = lower(trim(answer));
  while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
  static const std::set<std::string> yes = {"true", "t", "yes", "y", "1", "correct"};
  static const std::set<std::string> no = {"false", "f", "no", "n", "0", "incorrect"};
  if (yes.count(t)) return true;
  if (no.count(t)) return false;
  return std::nullopt;
}

GradingResult grade_fact_check(const BenchItem& item, const std::string& answer) {
  expect_kind(item, BenchKind::kFactCheck);
  auto value = parse_boolean_label(answer);
  if (!value) {
    auto r = make(item, 0.0);
    r.flags.push_back("unparseable");
    return r;
  }
  const bool gold = item.gold.labels.at(0) == "true";
  return make(item, *value == gold ? 1.0 : 0.0);
}

std::vector<std::string> parse_label_set(const BenchItem& item, const std::string& answer) {
  std::string text = trim(answer);
  if (!text.empty() && text.front() == '[') {
    auto j = json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_array()) {
      std::vector<std::string> out;
      for (const auto& v : j) {
        if (v.is_string()) out.push_back(v.get<std::string>());
      }
      return out;
    }
  }
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ';' || c == ' ' || c == '\t' || c == '/' || c == '|') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  // "ACD" with single-character labels.
  if (tokens.size() == 1 && tokens[0].size() > 1 && !is_option(item, canonical_label(item, tokens[0]))) {
    bool all_labels = true;
    for (char c : tokens[0]) all_labels = all_labels && is_option(item, canonical_label(item, std::string(1, c)));
    if (all_labels) {
      std::vector<std::string> out;
      for (char c : tokens[0]) out.emplace_back(1, c);
      return out;
    }
  }
  return tokens;
}

GradingResult grade(const BenchItem& item, const json& answer) {
  auto as_text = [&]() -> std::optional<std::string> {
    if (answer.is_string()) return answer.get<std::string>();
    if (answer.is_boolean()) return answer.get<bool>() ? "true" : "false";
    if (answer.is_array() && answer.size() == 1 && answer[0].is_string()) return answer[0].get<std::string>();
    return std::nullopt;
  };
  switch (item.kind) {
    case BenchKind::kSingleChoice: {
      auto t = as_text();
      if (!t) {
        auto r = make(item, 0.0);
        r.flags.push_back("invalid");
        return r;
      }
      return grade_single_choice(item, *t);
    }
    case BenchKind::kMultipleChoice: {
      std::vector<std::string> labels;
      if (answer.is_array()) {
        for (const auto& v : answer) {
          if (v.is_string()) labels.push_back(v.get<std::string>());
        }
      } else if (answer.is_string()) {
        labels = parse_label_set(item, answer.get<std::string>());
      }
      return grade_multiple_choice(item, labels);
    }
    case BenchKind::kFactCheck: {
      auto t = as_text();
      return grade_fact_check(item, t.value_or(""));
    }
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "item '" + item.id + "' is not an objective item");
  }
}

json to_json(const SubjectiveScore& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {{"item_id", s.item_id},
            {"kind", std::string(to_string(s.kind))},
            {"a_score", opt(s.a_score)},
            {"e_score", opt(s.e_score)},
            {"judge_transcript", s.judge_transcript},
            {"flags", s.flags},
            {"parked", s.parked}};
  return j;
}

SubjectiveScore judge_subjective(const BenchItem& item, const std::string& candidate_answer,
                                 const std::string& reference_answer,
                                 const gateway::AgentHandle& judge) {
  SubjectiveScore out;
  out.item_id = item.id;
  out.kind = item.kind;
  struct Ask {
    const char* template_name;
    const char* flag;
    std::optional<double>* target;
    gateway::SlotMap slots;
  };
  std::vector<Ask> asks = {
      {"a_score", "a_score_invalid", &out.a_score,
       {{"question", item.stem}, {"reference", reference_answer}, {"answer", candidate_answer}}},
      {"e_score", "e_score_invalid", &out.e_score,
       {{"question", item.stem}, {"answer", candidate_answer}}},
  };
  for (auto& ask : asks) {
    for (int attempt = 0; attempt < 2 && !*ask.target; ++attempt) {
      auto r = gateway::dispatch(judge, ask.slots, ask.template_name);
      if (!r.ok) {
        out.parked = true;
        out.flags.push_back(std::string(ask.template_name) + ": " + r.error);
        break;
      }
      if (!out.judge_transcript.empty()) out.judge_transcript += "\n";
      out.judge_transcript += r.text;
      *ask.target = gateway::parse_score_reply(r.text);
    }
    if (out.parked) break;
    if (!*ask.target) out.flags.push_back(ask.flag);
  }
  if (out.parked) {
    out.a_score.reset();
    out.e_score.reset();
  }
  return out;
}

double objective_average(const std::vector<double>& task_accuracies) {
  if (task_accuracies.empty()) throw Error(ErrorCode::kEmptyInput, "no task accuracies");
  double sum = 0.0;
  for (double a : task_accuracies) sum += a;
  return sum / static_cast<double>(task_accuracies.size());
}

BenchReport aggregate(const std::vector<GradingResult>& results,
                      const std::vector<SubjectiveScore>& subjective,
                      const std::map<BenchKind, std::string>& human_grades) {
  BenchReport rep;
  for (const auto& r : results) {
    auto& row = rep.objective[r.kind];
    ++row.items;
    row.credit += r.credit;
    if (!r.flags.empty()) ++rep.flagged;
  }
  std::vector<double> accs;
  for (auto& [kind, row] : rep.objective) {
    row.accuracy = row.items == 0 ? 0.0 : 100.0 * row.credit / static_cast<double>(row.items);
    accs.push_back(row.accuracy);
  }
  if (!accs.empty()) rep.objective_average = objective_average(accs);

  std::map<BenchKind, std::pair<double, double>> sums;
  for (const auto& s : subjective) {
    auto& row = rep.subjective[s.kind];
    ++row.items;
    if (!s.flags.empty()) ++rep.flagged;
    if (s.parked) {
      ++row.parked;
      continue;
    }
    if (s.a_score && s.e_score) {
      ++row.scored;
      sums[s.kind].first += *s.a_score;
      sums[s.kind].second += *s.e_score;
    }
  }
  for (auto& [kind, row] : rep.subjective) {
    if (row.scored > 0) {
      row.a_score = sums[kind].first / static_cast<double>(row.scored);
      row.e_score = sums[kind].second / static_cast<double>(row.scored);
    }
  }
  for (const auto& [kind, grade] : human_grades) rep.subjective[kind].h_grade = grade;
  return rep;
}

json to_json(const BenchReport& r) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json j = {{"model", r.model}};
  const std::pair<BenchKind, const char*> objective_cols[] = {
      {BenchKind::kSingleChoice, "S-C"}, {BenchKind::kMultipleChoice, "M-C"}, {BenchKind::kFactCheck, "FC"}};
  for (const auto& [kind, col] : objective_cols) {
    auto it = r.objective.find(kind);
    j[col] = it == r.objective.end() ? json(nullptr) : json(it->second.accuracy);
  }
  const std::pair<BenchKind, const char*> subjective_cols[] = {
      {BenchKind::kESM, "ESM"}, {BenchKind::kExplanation, "Exp"}, {BenchKind::kQA, "Q&A"}};
  for (const auto& [kind, col] : subjective_cols) {
    auto it = r.subjective.find(kind);
    if (it == r.subjective.end()) {
      j[col] = {{"A", nullptr}, {"E", nullptr}, {"H", nullptr}};
      continue;
    }
    j[col] = {{"A", opt(it->second.a_score)}, {"E", opt(it->second.e_score)},
              {"H", opt(it->second.h_grade)}};
  }
  j["objective_average"] = opt(r.objective_average);
  json counts = json::object();
  for (const auto& [kind, row] : r.objective) {
    counts[std::string(to_string(kind))] = {{"items", row.items}, {"credit", row.credit}};
  }
  for (const auto& [kind, row] : r.subjective) {
    counts[std::string(to_string(kind))] = {
        {"items", row.items}, {"scored", row.scored}, {"parked", row.parked}};
  }
  j["counts"] = counts;
  j["flagged"] = r.flagged;
  return j;
}

std::vector<ModelAnswer> answers_from_jsonl(const std::vector<json>& rows) {
  std::vector<ModelAnswer> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    require(row.is_object() && row.contains("item_id") && row["item_id"].is_string() &&
                row.contains("answer"),
            "answer row " + std::to_string(i + 1) + " needs item_id and answer");
    out.push_back({row["item_id"].get<std::string>(), row["answer"]});
  }
  return out;
}

EvalRun evaluate(const std::vector<BenchItem>& items, const std::vector<ModelAnswer>& answers,
                 const EvalOptions& options) {
  std::unordered_map<std::string, const json*> by_id;
  for (const auto& a : answers) {
    require(by_id.emplace(a.item_id, &a.answer).second, "duplicate answer for '" + a.item_id + "'");
  }
  EvalRun run;
  std::vector<std::size_t> subjective_idx;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    validate(item);
    auto it = by_id.find(item.id);
    if (is_objective_kind(item.kind)) {
      if (it == by_id.end()) {
        auto r = make(item, 0.0);
        r.flags.push_back("missing");
        ++run.unanswered;
        run.objective.push_back(std::move(r));
      } else {
        run.objective.push_back(grade(item, *it->second));
      }
    } else {
      subjective_idx.push_back(i);
    }
  }
  run.subjective.resize(subjective_idx.size());
  parallel_for(
      subjective_idx.size(),
      [&](std::size_t k) {
        const auto& item = items[subjective_idx[k]];
        auto it = by_id.find(item.id);
        SubjectiveScore s;
        s.item_id = item.id;
        s.kind = item.kind;
        if (it == by_id.end() || !it->second->is_string()) {
          s.flags.push_back("missing");
        } else if (options.judge == nullptr) {
          s.flags.push_back("unjudged");
        } else {
          s = judge_subjective(item, it->second->get<std::string>(), item.gold.reference,
                               *options.judge);
        }
        run.subjective[k] = std::move(s);
      },
      static_cast<std::size_t>(std::max(1, options.max_in_flight)));
  for (const auto& s : run.subjective) {
    if (!s.flags.empty() && s.flags[0] == "missing") ++run.unanswered;
  }
  run.report = aggregate(run.objective, run.subjective, options.human_grades);
  run.report.model = options.model;
  return run;
}

}  // namespace curator::bench
