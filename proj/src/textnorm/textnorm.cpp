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

#include "textnorm/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "config/config.hpp"
#include "textnorm/utf8.hpp"
#include "translit_embedded_data.hpp"

namespace translit::textnorm {
namespace {

char32_t parse_hex(std::string_view tok, std::string_view context) {
  if (tok.empty() || tok.size() > 6) {
    fail(ErrorKind::kConfig, "bad codepoint '" + std::string(tok) + "' in " + std::string(context));
  }
  char32_t v = 0;
  for (char c : tok) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<char32_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<char32_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<char32_t>(c - 'A' + 10);
    else fail(ErrorKind::kConfig, "bad codepoint '" + std::string(tok) + "' in " + std::string(context));
  }
  if (v > 0x10FFFF) fail(ErrorKind::kConfig, "codepoint out of range in " + std::string(context));
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::u32string parse_sequence(std::string_view field, std::string_view context) {
  std::u32string out;
  for (auto tok : split_ws(field)) out.push_back(parse_hex(tok, context));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) fail(ErrorKind::kInternal, "ICU NFC normalizer unavailable");
  return *n;
}

std::size_t count_in(std::u32string_view s, const CodepointSet& set) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [&](char32_t c) { return set.contains(c); }));
}

}  // namespace

CodepointSet::CodepointSet(std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end());
  for (const auto& r : ranges) {
    if (r.first > r.second) fail(ErrorKind::kConfig, "codepoint range with LO > HI");
    if (!ranges_.empty() && r.first <= ranges_.back().second + 1) {
      ranges_.back().second = std::max(ranges_.back().second, r.second);
    } else {
      ranges_.push_back(r);
    }
  }
}

CodepointSet CodepointSet::parse(std::string_view spec) {
  std::vector<Range> ranges;
  for (auto tok : split_ws(spec)) {
    const auto dash = tok.find('-');
    if (dash == std::string_view::npos) {
      const char32_t cp = parse_hex(tok, spec);
      ranges.emplace_back(cp, cp);
    } else {
      ranges.emplace_back(parse_hex(tok.substr(0, dash), spec), parse_hex(tok.substr(dash + 1), spec));
    }
  }
  return CodepointSet(std::move(ranges));
}

bool CodepointSet::contains(char32_t cp) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), cp,
                             [](char32_t v, const Range& r) { return v < r.first; });
  if (it == ranges_.begin()) return false;
  --it;
  return cp <= it->second;
}

bool CodepointSet::intersects(const CodepointSet& other) const {
  std::size_t i = 0, j = 0;
  while (i < ranges_.size() && j < other.ranges_.size()) {
    const auto& a = ranges_[i];
    const auto& b = other.ranges_[j];
    if (a.second < b.first) ++i;
    else if (b.second < a.first) ++j;
    else return true;
  }
  return false;
}

std::string CodepointSet::to_string() const {
  std::string out;
  char buf[24];
  for (const auto& [lo, hi] : ranges_) {
    if (!out.empty()) out += ' ';
    if (lo == hi) std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(lo));
    else std::snprintf(buf, sizeof buf, "%04X-%04X", static_cast<unsigned>(lo), static_cast<unsigned>(hi));
    out += buf;
  }
  return out;
}

const char* script_name(Script s) {
  switch (s) {
    case Script::kTajikCyrillic: return "TajikCyrillic";
    case Script::kPersoArabic: return "PersoArabic";
    case Script::kNeutral: return "Neutral";
  }
  return "?";
}

ScriptTable ScriptTable::from_config(const Config& config) {
  ScriptTable t;
  t.tajik.ranges = CodepointSet::parse(config.get("script.tajik"));
  t.persian.ranges = CodepointSet::parse(config.get("script.persian"));
  t.neutral.ranges = CodepointSet::parse(config.get("script.neutral"));
  if (t.tajik.ranges.intersects(t.persian.ranges))
    fail(ErrorKind::kConfig, "script.tajik and script.persian overlap");
  if (t.neutral.ranges.intersects(t.tajik.ranges) || t.neutral.ranges.intersects(t.persian.ranges))
    fail(ErrorKind::kConfig, "script.neutral overlaps a script class");
  return t;
}

VariantMap VariantMap::parse(std::string_view text, std::span<const std::string> enabled_groups) {
  VariantMap map;
  map.groups_.assign(enabled_groups.begin(), enabled_groups.end());
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto t = trim(view); t.rfind('#', 0) == 0) {
      // Header comments may carry "# name: ..." and "# version: ...".
      std::string body = trim(std::string_view(t).substr(1));
      if (body.rfind("name:", 0) == 0) map.name_ = trim(std::string_view(body).substr(5));
      if (body.rfind("version:", 0) == 0) map.version_ = trim(std::string_view(body).substr(8));
      continue;
    }
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (trim(view).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = view.find('\t', start);
      fields.push_back(trim(view.substr(start, tab == std::string_view::npos ? tab : tab - start)));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    while (!fields.empty() && fields.back().empty() && fields.size() > 2) fields.pop_back();
    const std::string where = "variant map line " + std::to_string(lineno);
    if (fields.size() < 2 || fields.size() > 3) fail(ErrorKind::kConfig, where + ": expected SRC<TAB>DST");
    VariantRule rule{parse_sequence(fields[0], where), parse_sequence(fields[1], where),
                     fields.size() == 3 ? fields[2] : std::string()};
    if (rule.source.empty()) fail(ErrorKind::kConfig, where + ": empty source");
    if (!rule.group.empty() &&
        std::find(enabled_groups.begin(), enabled_groups.end(), rule.group) == enabled_groups.end()) {
      continue;
    }
    map.rules_.push_back(std::move(rule));
  }

  std::vector<std::size_t> order(map.rules_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return map.rules_[a].source < map.rules_[b].source; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = map.rules_[order[i - 1]].source;
    const auto& cur = map.rules_[order[i]].source;
    if (cur.compare(0, prev.size(), prev) == 0) {
      fail(ErrorKind::kConfig, "variant map: source of rule " + std::to_string(order[i - 1] + 1) +
                                   " is a prefix of (or equal to) another source");
    }
  }
  for (std::size_t i = 0; i < map.rules_.size(); ++i) {
    map.by_first_[map.rules_[i].source.front()].push_back(i);
  }
  for (auto& [first, idx] : map.by_first_) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return map.rules_[a].source.size() > map.rules_[b].source.size();
    });
  }
  for (const auto& rule : map.rules_) {
    if (map.apply(rule.target) != rule.target) {
      fail(ErrorKind::kConfig, "variant map is not idempotent: a rule target contains a rule source");
    }
  }
  return map;
}

VariantMap VariantMap::builtin(std::span<const std::string> enabled_groups) {
  return parse(embedded::kVariantMap, enabled_groups);
}

std::ptrdiff_t VariantMap::match(std::u32string_view s, std::size_t pos) const {
  auto it = by_first_.find(s[pos]);
  if (it == by_first_.end()) return -1;
  for (std::size_t idx : it->second) {
    const auto& src = rules_[idx].source;
    if (s.substr(pos, src.size()) == src) return static_cast<std::ptrdiff_t>(idx);
  }
  return -1;
}

std::u32string VariantMap::apply(std::u32string_view s) const {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto r = match(s, i);
    if (r < 0) {
      out.push_back(s[i++]);
    } else {
      const auto& rule = rules_[static_cast<std::size_t>(r)];
      out += rule.target;
      i += rule.source.size();
    }
  }
  return out;
}

CodepointSet default_diacritics() { return CodepointSet({{0x064B, 0x0652}, {0x0670, 0x0670}}); }

std::string nfc_normalize(std::string_view s) {
  utf8::decode(s);  // validates, reporting the byte offset of bad input
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  const icu::UnicodeString out = nfc_instance().normalize(src, status);
  if (U_FAILURE(status)) fail(ErrorKind::kInternal, std::string("NFC normalization failed: ") + u_errorName(status));
  std::string result;
  out.toUTF8String(result);
  return result;
}

bool is_nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  const bool ok = nfc_instance().isNormalized(src, status);
  return U_SUCCESS(status) && ok;
}

std::string fold_variants(std::string_view s, const VariantMap& map) {
  return nfc_normalize(utf8::encode(map.apply(utf8::decode(s))));
}

std::string strip_diacritics(std::string_view s, const CodepointSet& diacritics) {
  std::u32string cps = utf8::decode(s);
  std::erase_if(cps, [&](char32_t c) { return diacritics.contains(c); });
  return utf8::encode(cps);
}

std::string strip_diacritics(std::string_view s) { return strip_diacritics(s, default_diacritics()); }

std::string canonicalize_whitespace(std::string_view s) {
  const std::u32string cps = utf8::decode(s);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t c : cps) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return utf8::encode(out);
}

ValidationReport validate_script(std::string_view s, const ScriptClass& expected,
                                 const ScriptClass& neutral) {
  ValidationReport report;
  const std::u32string cps = utf8::decode(s);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!expected.ranges.contains(cps[i]) && !neutral.ranges.contains(cps[i])) {
      report.violations.push_back({i, cps[i]});
    }
  }
  report.passed = report.violations.empty();
  return report;
}

Normalizer::Normalizer() : Normalizer(Config()) {}

Normalizer::Normalizer(const Config& config) {
  const auto groups = config.get_list("textnorm.variant_groups");
  if (auto path = config.get_path("textnorm.variant_map")) {
    variants_ = VariantMap::parse(read_file(*path), groups);
  } else {
    variants_ = VariantMap::builtin(groups);
  }
  diacritics_ = CodepointSet::parse(config.get("textnorm.diacritics"));
  scripts_ = ScriptTable::from_config(config);
  strip_ = config.get_bool("textnorm.strip_diacritics");
  for (const auto& rule : variants_.rules()) {
    if (count_in(rule.source, diacritics_) != count_in(rule.target, diacritics_)) {
      fail(ErrorKind::kConfig, "variant map rule changes the number of diacritics");
    }
  }
}

std::string Normalizer::normalize(std::string_view s) const {
  std::string out = fold_variants(canonicalize_whitespace(nfc_normalize(s)), variants_);
  if (strip_) out = strip_diacritics(out, diacritics_);
  return out;
}

}  // namespace translit::textnorm
