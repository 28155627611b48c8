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

#include "curator/ingest/filter.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "curator/core/error.hpp"
#include "curator/core/utf8.hpp"

namespace curator::ingest {

namespace {

bool is_printable(char32_t cp) {
  if (cp == '\n' || cp == '\t' || cp == '\r') return true;
  if (cp < 0x20 || cp == 0x7F) return false;
  if (cp >= 0x80 && cp <= 0x9F) return false;
  if (cp == 0xFFFD || cp == 0xFFFE || cp == 0xFFFF) return false;
  if (cp >= 0xE000 && cp <= 0xF8FF) return false;  // private use
  return true;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\n' || cp == '\t' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || cp == 0x3000;
}

// ASCII letters and digits, plus non-ASCII code points outside the common
// punctuation, symbol and replacement blocks (covers Latin-1 letters, Greek,
// Cyrillic, CJK ideographs, ...).
bool is_alnum(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, arrows, math operators
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;  // fullwidth punctuation
  if (cp >= 0xE000 && cp <= 0xF8FF) return false;
  if (cp >= 0xFFF0) return false;
  return true;
}

std::string lower_ascii(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         (static_cast<unsigned char>(c) & 0x80);
}

}  // namespace

FilterPolicy FilterPolicy::defaults() {
  FilterPolicy p;
  p.pii_patterns = {
      // email address
      R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})",
      // international / North American phone number
      R"(\+\d{1,3}[ .-]?\(?\d{1,4}\)?[ .-]?\d{3,4}[ .-]?\d{3,4})",
      R"(\(\d{3}\) ?\d{3}-\d{4})",
      // mainland China mobile number
      R"(\b1[3-9]\d{9}\b)",
      // resident identity number (18 chars)
      R"(\b\d{17}[\dXx]\b)",
      // US social security number
      R"(\b\d{3}-\d{2}-\d{4}\b)",
  };
  p.pii_max_matches = 3;
  p.blocklist = {"bomb-making", "child sexual", "credit card dump", "make a bomb",
                 "nerve agent synthesis", "ransomware kit"};
  p.min_printable = 0.90;
  p.min_alnum = 0.40;
  return p;
}

FilterPolicy policy_from_json(const nlohmann::json& j) {
  FilterPolicy p = FilterPolicy::defaults();
  try {
    if (j.contains("pii_patterns")) p.pii_patterns = j.at("pii_patterns").get<std::vector<std::string>>();
    if (j.contains("pii_max_matches")) p.pii_max_matches = j.at("pii_max_matches").get<int>();
    if (j.contains("blocklist")) p.blocklist = j.at("blocklist").get<std::vector<std::string>>();
    if (j.contains("min_printable")) p.min_printable = j.at("min_printable").get<double>();
    if (j.contains("min_alnum")) p.min_alnum = j.at("min_alnum").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("filter policy: ") + e.what());
  }
  for (const auto& pat : p.pii_patterns) {
    try {
      std::regex re(pat);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kConfig, "filter policy: bad pattern '" + pat + "': " + e.what());
    }
  }
  require(p.min_printable >= 0.0 && p.min_printable <= 1.0, "min_printable must be in [0,1]",
          ErrorCode::kConfig);
  require(p.min_alnum >= 0.0 && p.min_alnum <= 1.0, "min_alnum must be in [0,1]",
          ErrorCode::kConfig);
  return p;
}

nlohmann::json to_json(const FilterPolicy& p) {
  return {{"pii_patterns", p.pii_patterns},
          {"pii_max_matches", p.pii_max_matches},
          {"blocklist", p.blocklist},
          {"min_printable", p.min_printable},
          {"min_alnum", p.min_alnum}};
}

TextRatios text_ratios(const std::string& text) {
  auto cps = decode_utf8(text);
  TextRatios r;
  if (cps.empty()) return r;
  std::size_t printable = 0;
  std::size_t non_space = 0;
  std::size_t alnum = 0;
  for (char32_t cp : cps) {
    if (is_printable(cp)) ++printable;
    if (!is_space(cp)) {
      ++non_space;
      if (is_alnum(cp)) ++alnum;
    }
  }
  r.printable = static_cast<double>(printable) / static_cast<double>(cps.size());
  r.alnum = non_space == 0 ? 0.0 : static_cast<double>(alnum) / static_cast<double>(non_space);
  return r;
}

int count_pii_matches(const std::string& text, const FilterPolicy& policy) {
  int n = 0;
  for (const auto& pat : policy.pii_patterns) {
    std::regex re(pat);
    n += static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                        std::sregex_iterator()));
  }
  return n;
}

int count_blocklist_matches(const std::string& text, const FilterPolicy& policy) {
  const std::string hay = lower_ascii(text);
  int n = 0;
  for (const auto& raw_term : policy.blocklist) {
    const std::string term = lower_ascii(raw_term);
    if (term.empty()) continue;
    for (std::size_t pos = hay.find(term); pos != std::string::npos;
         pos = hay.find(term, pos + 1)) {
      bool left = pos == 0 || !word_char(hay[pos - 1]);
      bool right = pos + term.size() >= hay.size() || !word_char(hay[pos + term.size()]);
      if (left && right) ++n;
    }
  }
  return n;
}

FilterDecision filter_content(const Document& doc, const FilterPolicy& policy) {
  FilterDecision d;
  int pii = count_pii_matches(doc.text, policy);
  if (pii > policy.pii_max_matches) {
    d.keep = false;
    d.reason = DropReason::kPii;
    d.detail = std::to_string(pii) + " PII matches (max " + std::to_string(policy.pii_max_matches) + ")";
    return d;
  }
  int blocked = count_blocklist_matches(doc.text, policy);
  if (blocked > 0) {
    d.keep = false;
    d.reason = DropReason::kHarmful;
    d.detail = std::to_string(blocked) + " blocklisted terms";
    return d;
  }
  TextRatios r = text_ratios(doc.text);
  if (r.printable < policy.min_printable || r.alnum < policy.min_alnum) {
    d.keep = false;
    d.reason = DropReason::kGarbled;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "printable %.3f, alnum %.3f", r.printable, r.alnum);
    d.detail = buf;
    return d;
  }
  return d;
}

}  // namespace curator::ingest
