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

#include "curator/ingest/normalize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string_view>
#include <vector>

namespace curator::ingest {

namespace {

bool starts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.size() >= i + prefix.size() && s.compare(i, prefix.size(), prefix) == 0;
}

bool istarts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  if (s.size() < i + prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[i + k])) !=
        std::tolower(static_cast<unsigned char>(prefix[k]))) {
      return false;
    }
  }
  return true;
}

std::size_t ifind(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (istarts_with_at(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

bool is_hspace(char c) { return c == ' ' || c == '\t'; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// An odd run of backslashes before position i escapes s[i].
bool escaped(std::string_view s, std::size_t i) {
  std::size_t n = 0;
  while (i > n && s[i - n - 1] == '\\') ++n;
  return n % 2 == 1;
}

// ---- images ---------------------------------------------------------------

struct ImageMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string alt;
};

bool is_data_uri_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/' || c == '=' ||
         c == ';' || c == ',' || c == '.' || c == ':' || c == '-';
}

std::optional<ImageMatch> match_image_at(std::string_view s, std::size_t i) {
  if (s[i] == '!' && starts_with_at(s, i, "![")) {
    std::size_t close = i + 2;
    while (close < s.size() && s[close] != ']' && s[close] != '\n') ++close;
    if (close >= s.size() || s[close] != ']' || close + 1 >= s.size() || s[close + 1] != '(') {
      return std::nullopt;
    }
    std::size_t paren = s.find(')', close + 2);
    if (paren == std::string_view::npos) return std::nullopt;
    return ImageMatch{i, paren + 1, trim(s.substr(i + 2, close - i - 2))};
  }
  if (s[i] == '<' && istarts_with_at(s, i, "<img") && i + 4 < s.size() &&
      (is_hspace(s[i + 4]) || s[i + 4] == '\n' || s[i + 4] == '>' || s[i + 4] == '/')) {
    std::size_t gt = s.find('>', i);
    if (gt == std::string_view::npos) return std::nullopt;
    std::string_view tag = s.substr(i, gt + 1 - i);
    std::string alt;
    if (auto a = ifind(tag, "alt=\"", 0); a != std::string_view::npos) {
      auto q = tag.find('"', a + 5);
      if (q != std::string_view::npos) alt = trim(tag.substr(a + 5, q - a - 5));
    }
    return ImageMatch{i, gt + 1, alt};
  }
  if (s[i] == 'd' && starts_with_at(s, i, "data:image/")) {
    std::size_t e = i;
    while (e < s.size() && is_data_uri_char(s[e])) ++e;
    return ImageMatch{i, e, {}};
  }
  return std::nullopt;
}

bool caption_follows(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_hspace(s[pos])) ++pos;
  if (pos < s.size() && s[pos] == '\n') {
    ++pos;
    while (pos < s.size() && is_hspace(s[pos])) ++pos;
  }
  static constexpr std::array<std::string_view, 6> kCaptionPrefixes = {
      "Figure", "FIGURE", "Fig.", "FIG.", "Fig ", "\xE5\x9B\xBE"};  // last is U+56FE
  return std::any_of(kCaptionPrefixes.begin(), kCaptionPrefixes.end(),
                     [&](std::string_view p) { return starts_with_at(s, pos, p); });
}

std::string reduce_images(std::string_view s, int& count) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto m = match_image_at(s, i);
    if (!m) {
      out += s[i++];
      continue;
    }
    ++count;
    std::size_t after = m->end;
    if (caption_follows(s, after) || m->alt.empty()) {
      while (after < s.size() && is_hspace(s[after])) ++after;
    } else {
      out += m->alt;
    }
    i = after;
  }
  return out;
}

// ---- formulas -------------------------------------------------------------

struct MathEnv {
  std::string_view name;
  bool keep_environment;  // multi-line alignment environments stay inside $$
};

constexpr std::array<MathEnv, 10> kMathEnvs = {{
    {"equation*", false},
    {"equation", false},
    {"displaymath", false},
    {"math", false},
    {"align*", true},
    {"align", true},
    {"gather*", true},
    {"gather", true},
    {"multline", true},
    {"eqnarray", true},
}};

std::string convert_math(std::string_view s, int& count) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\\' && i + 1 < s.size() && !escaped(s, i)) {
      const char next = s[i + 1];
      if (next == '(' || next == '[') {
        const std::string_view closer = next == '(' ? "\\)" : "\\]";
        std::size_t close = s.find(closer, i + 2);
        while (close != std::string_view::npos && escaped(s, close)) {
          close = s.find(closer, close + 1);
        }
        if (close != std::string_view::npos) {
          const std::string_view delim = next == '(' ? "$" : "$$";
          out += delim;
          out += s.substr(i + 2, close - i - 2);
          out += delim;
          ++count;
          i = close + 2;
          continue;
        }
      } else if (starts_with_at(s, i, "\\begin{")) {
        bool converted = false;
        for (const auto& env : kMathEnvs) {
          std::string open = "\\begin{" + std::string(env.name) + "}";
          if (!starts_with_at(s, i, open)) continue;
          std::string close = "\\end{" + std::string(env.name) + "}";
          std::size_t end = s.find(close, i + open.size());
          if (end == std::string_view::npos) break;
          out += "$$";
          if (env.keep_environment) {
            out += s.substr(i, end + close.size() - i);
          } else {
            out += s.substr(i + open.size(), end - i - open.size());
          }
          out += "$$";
          ++count;
          i = end + close.size();
          converted = true;
          break;
        }
        if (converted) continue;
      }
    }
    out += s[i++];
  }
  return out;
}

// ---- citations ------------------------------------------------------------

std::string ref_marker(const std::string& key, const Bibliography* bib) {
  if (bib) {
    auto it = bib->find(key);
    if (it != bib->end() && !it->second.empty()) {
      return "[ref: " + key + ", p. " + it->second + "]";
    }
  }
  return "[ref: " + key + "]";
}

std::vector<std::string> split_keys(std::string_view keys, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= keys.size()) {
    auto end = keys.find(sep, start);
    if (end == std::string_view::npos) end = keys.size();
    std::string k = trim(keys.substr(start, end - start));
    if (!k.empty() && k[0] == '@') k = trim(std::string_view(k).substr(1));
    if (!k.empty()) out.push_back(k);
    start = end + 1;
  }
  return out;
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
         c == '.' || c == '/' || c == '+';
}

std::string annotate_citations(std::string_view s, const Bibliography* bib, int& count) {
  static constexpr std::array<std::string_view, 7> kCommands = {
      "\\citep", "\\citet", "\\citealp", "\\parencite", "\\textcite", "\\autocite", "\\cite"};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  auto emit = [&](const std::vector<std::string>& keys) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (k) out += ' ';
      out += ref_marker(keys[k], bib);
      ++count;
    }
  };
  while (i < s.size()) {
    if (s[i] == '\\') {
      bool done = false;
      for (auto cmd : kCommands) {
        if (!starts_with_at(s, i, cmd)) continue;
        std::size_t p = i + cmd.size();
        if (p < s.size() && s[p] == '*') ++p;
        while (p < s.size() && s[p] == '[') {  // optional pre/post notes
          auto rb = s.find(']', p);
          if (rb == std::string_view::npos) break;
          p = rb + 1;
        }
        if (p >= s.size() || s[p] != '{') break;
        auto rb = s.find('}', p);
        if (rb == std::string_view::npos) break;
        auto keys = split_keys(s.substr(p + 1, rb - p - 1), ',');
        if (keys.empty()) break;
        emit(keys);
        i = rb + 1;
        done = true;
        break;
      }
      if (done) continue;
    } else if (s[i] == '[' && i + 1 < s.size() && s[i + 1] == '@') {
      auto rb = s.find(']', i);
      if (rb != std::string_view::npos) {
        std::string_view body = s.substr(i + 1, rb - i - 1);
        bool valid = body.find('\n') == std::string_view::npos;
        auto keys = split_keys(body, ';');
        for (const auto& k : keys) {
          valid = valid && std::all_of(k.begin(), k.end(), is_key_char);
        }
        if (valid && !keys.empty()) {
          emit(keys);
          i = rb + 1;
          continue;
        }
      }
    }
    out += s[i++];
  }
  return out;
}

// ---- tables ---------------------------------------------------------------

std::string strip_tags_and_entities(std::string_view s) {
  std::string text;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') {
      in_tag = true;
      text += ' ';
    } else if (c == '>') {
      in_tag = false;
    } else if (!in_tag) {
      text += c;
    }
  }
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kEntities = {{
      {"&nbsp;", " "}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&amp;", "&"}}};
  for (const auto& [from, to] : kEntities) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  std::string collapsed;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !collapsed.empty()) collapsed += ' ';
      space = false;
      collapsed += c;
    }
  }
  return collapsed;
}

std::string escape_cell(const std::string& cell) {
  std::string out;
  for (char c : cell) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string render_pipe_table(const std::vector<std::vector<std::string>>& rows) {
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  std::string out;
  auto emit_row = [&](const std::vector<std::string>& r) {
    out += '|';
    for (std::size_t c = 0; c < cols; ++c) {
      out += ' ';
      out += c < r.size() ? escape_cell(r[c]) : std::string{};
      out += " |";
    }
    out += '\n';
  };
  emit_row(rows[0]);
  out += '|';
  for (std::size_t c = 0; c < cols; ++c) out += " --- |";
  out += '\n';
  for (std::size_t r = 1; r < rows.size(); ++r) emit_row(rows[r]);
  out.pop_back();
  return out;
}

std::vector<std::vector<std::string>> parse_html_rows(std::string_view table) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while ((pos = ifind(table, "<tr", pos)) != std::string_view::npos) {
    std::size_t row_end = ifind(table, "</tr", pos);
    std::size_t next_row = ifind(table, "<tr", pos + 3);
    if (row_end == std::string_view::npos || (next_row != std::string_view::npos && next_row < row_end)) {
      row_end = next_row == std::string_view::npos ? table.size() : next_row;
    }
    std::string_view row = table.substr(pos, row_end - pos);
    std::vector<std::string> cells;
    std::size_t c = 0;
    while (true) {
      std::size_t td = ifind(row, "<td", c);
      std::size_t th = ifind(row, "<th", c);
      std::size_t open = std::min(td, th);
      if (open == std::string_view::npos) break;
      std::size_t gt = row.find('>', open);
      if (gt == std::string_view::npos) break;
      std::size_t close = std::min(ifind(row, "</td", gt), ifind(row, "</th", gt));
      std::size_t next_cell = std::min(ifind(row, "<td", gt), ifind(row, "<th", gt));
      if (close == std::string_view::npos || next_cell < close) {
        close = next_cell == std::string_view::npos ? row.size() : next_cell;
      }
      cells.push_back(strip_tags_and_entities(row.substr(gt + 1, close - gt - 1)));
      c = close;
      if (c >= row.size()) break;
      if (row[c] == '<' && c + 1 < row.size() && row[c + 1] == '/') c += 2;
    }
    if (!cells.empty()) rows.push_back(std::move(cells));
    pos = row_end;
  }
  return rows;
}

std::string convert_html_tables(std::string_view s, int& count) {
  std::string out;
  std::size_t i = 0;
  while (true) {
    std::size_t open = ifind(s, "<table", i);
    if (open == std::string_view::npos) break;
    std::size_t close = ifind(s, "</table>", open);
    if (close == std::string_view::npos) break;
    auto rows = parse_html_rows(s.substr(open, close - open));
    out.append(s.substr(i, open - i));
    if (rows.empty()) {
      out.append(s.substr(open, close + 8 - open));
    } else {
      if (!out.empty() && out.back() != '\n') out += '\n';
      out += render_pipe_table(rows);
      ++count;
      if (close + 8 < s.size() && s[close + 8] != '\n') out += '\n';
    }
    i = close + 8;
  }
  out.append(s.substr(i));
  return out;
}

std::vector<std::string> split_tsv(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    cells.push_back(trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                          : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cells;
}

bool tsv_candidate(std::string_view line) {
  if (line.find('\t') == std::string_view::npos) return false;
  std::string t = trim(line);
  return !t.empty() && t[0] != '|';
}

std::string convert_tsv_tables(std::string_view s, int& count) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (true) {
    auto eol = s.find('\n', pos);
    lines.push_back(s.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size();) {
    std::size_t j = i;
    std::size_t cols = 0;
    while (j < lines.size() && tsv_candidate(lines[j])) {
      std::size_t n = split_tsv(lines[j]).size();
      if (j == i) cols = n;
      if (n != cols || n < 2) break;
      ++j;
    }
    if (j - i >= 2) {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = i; k < j; ++k) rows.push_back(split_tsv(lines[k]));
      out += render_pipe_table(rows);
      ++count;
      i = j;
    } else {
      out.append(lines[i]);
      ++i;
    }
    if (i < lines.size()) out += '\n';
  }
  return out;
}

// ---- segmentation ---------------------------------------------------------

bool is_fence(std::string_view line) {
  std::size_t k = 0;
  while (k < line.size() && k < 3 && line[k] == ' ') ++k;
  return starts_with_at(line, k, "```") || starts_with_at(line, k, "~~~");
}

// Splits into alternating prose/code segments; code segments include their
// fence lines.
std::vector<std::pair<bool, std::string>> segments(std::string_view s) {
  std::vector<std::pair<bool, std::string>> out;
  bool in_code = false;
  std::string current;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto eol = s.find('\n', pos);
    std::size_t end = eol == std::string_view::npos ? s.size() : eol + 1;
    std::string_view line = s.substr(pos, end - pos);
    if (is_fence(line)) {
      if (!in_code) {
        if (!current.empty()) out.emplace_back(false, std::move(current));
        current.clear();
        current.append(line);
        in_code = true;
      } else {
        current.append(line);
        out.emplace_back(true, std::move(current));
        current.clear();
        in_code = false;
      }
    } else {
      current.append(line);
    }
    pos = end;
  }
  if (!current.empty()) out.emplace_back(in_code, std::move(current));
  return out;
}

}  // namespace

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kPii: return "pii";
    case DropReason::kHarmful: return "harmful";
    case DropReason::kGarbled: return "garbled";
  }
  return "?";
}

NormalizedText normalize_markdown(const std::string& raw, const Bibliography* bib) {
  NormalizedText result;
  auto& rep = result.report;
  for (auto& [is_code, text] : segments(raw)) {
    if (is_code) {
      result.text += text;
      continue;
    }
    std::string t = convert_html_tables(text, rep.tables_converted);
    t = reduce_images(t, rep.images_reduced);
    t = convert_math(t, rep.formulas_converted);
    t = annotate_citations(t, bib, rep.citations_annotated);
    t = convert_tsv_tables(t, rep.tables_converted);
    result.text += t;
  }
  return result;
}

int count_image_payloads(const std::string& text) {
  int n = 0;
  for (auto& [is_code, seg] : segments(text)) {
    if (is_code) continue;
    for (std::size_t i = 0; i < seg.size();) {
      if (auto m = match_image_at(seg, i)) {
        ++n;
        i = m->end;
      } else {
        ++i;
      }
    }
  }
  return n;
}

}  // namespace curator::ingest
