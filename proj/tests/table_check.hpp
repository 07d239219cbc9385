// Copyright 2026 The translit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace tltest {

// A rendered plain-text table split back into cells. Columns are separated
// by runs of two or more spaces.
struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> rules_before;  // row indices preceded by a rule line
  std::string footer;
  bool well_formed = false;
};

inline std::vector<std::string> split_cells(const std::string& line) {
  static const std::regex sep("\\s{2,}");
  std::string s = line;
  s.erase(0, s.find_first_not_of(' '));
  while (!s.empty() && s.back() == ' ') s.pop_back();
  std::vector<std::string> out;
  for (std::sregex_token_iterator it(s.begin(), s.end(), sep, -1), end; it != end; ++it) out.push_back(*it);
  return out;
}

inline bool is_rule(const std::string& line) {
  return !line.empty() && line.find_first_not_of('-') == std::string::npos;
}

inline ParsedTable parse_table(const std::string& text) {
  ParsedTable t;
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  if (lines.size() < 3 || !is_rule(lines[1])) return t;
  t.header = split_cells(lines[0]);
  t.footer = lines.back();
  for (std::size_t i = 2; i + 1 < lines.size(); ++i) {
    if (is_rule(lines[i])) {
      t.rules_before.push_back(t.rows.size());
      continue;
    }
    auto cells = split_cells(lines[i]);
    if (cells.size() != t.header.size()) return t;
    t.rows.push_back(std::move(cells));
  }
  t.well_formed = true;
  return t;
}

inline bool matches(const std::string& s, const char* pattern) { return std::regex_match(s, std::regex(pattern)); }

// Checks shared by every results table: four-decimal metric cells.
inline bool metric_cell(const std::string& s) { return matches(s, "[01]\\.\\d{4}"); }
inline bool time_cell(const std::string& s) { return s == "-" || matches(s, "\\d+\\.\\d"); }
inline bool count_cell(const std::string& s) { return matches(s, "\\d{1,3}(,\\d{3})*"); }

inline std::size_t parse_count(std::string s) {
  std::string d;
  for (char c : s)
    if (c != ',') d += c;
  return std::stoul(d);
}

}  // namespace tltest
