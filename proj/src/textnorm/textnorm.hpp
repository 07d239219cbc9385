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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace translit {
class Config;
}

namespace translit::textnorm {

// Sorted, disjoint, inclusive codepoint intervals.
class CodepointSet {
 public:
  using Range = std::pair<char32_t, char32_t>;

  CodepointSet() = default;
  explicit CodepointSet(std::vector<Range> ranges);

  // "064B-0652 0670": whitespace-separated hex codepoints or LO-HI ranges.
  static CodepointSet parse(std::string_view spec);

  bool contains(char32_t cp) const;
  bool intersects(const CodepointSet& other) const;
  std::span<const Range> ranges() const { return ranges_; }
  std::string to_string() const;

 private:
  std::vector<Range> ranges_;
};

enum class Script { kTajikCyrillic, kPersoArabic, kNeutral };

const char* script_name(Script s);

struct ScriptClass {
  Script name = Script::kNeutral;
  CodepointSet ranges;
};

struct ScriptTable {
  ScriptClass tajik{Script::kTajikCyrillic, {}};
  ScriptClass persian{Script::kPersoArabic, {}};
  ScriptClass neutral{Script::kNeutral, {}};

  // Rejects overlapping script classes.
  static ScriptTable from_config(const Config& config);
};

struct VariantRule {
  std::u32string source;
  std::u32string target;
  std::string group;  // empty for always-on rules
};

class VariantMap {
 public:
  VariantMap() = default;

  // Parses the SRC<TAB>DST[<TAB>GROUP] format. Rules carrying a group are
  // kept only if that group is enabled. Throws kConfig when a source is a
  // prefix of another source or when the map is not idempotent.
  static VariantMap parse(std::string_view text, std::span<const std::string> enabled_groups);
  static VariantMap builtin(std::span<const std::string> enabled_groups = {});

  const std::string& name() const { return name_; }
  const std::string& version() const { return version_; }
  std::span<const VariantRule> rules() const { return rules_; }
  const std::vector<std::string>& enabled_groups() const { return groups_; }

  // Index of the longest rule whose source matches s at pos, or -1.
  std::ptrdiff_t match(std::u32string_view s, std::size_t pos) const;

  std::u32string apply(std::u32string_view s) const;

 private:
  std::string name_ = "unnamed";
  std::string version_ = "0";
  std::vector<VariantRule> rules_;
  std::vector<std::string> groups_;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

// Default diacritic set: Arabic harakat U+064B..U+0652 and superscript alef.
CodepointSet default_diacritics();

std::string nfc_normalize(std::string_view s);
bool is_nfc(std::string_view s);

std::string fold_variants(std::string_view s, const VariantMap& map);
std::string strip_diacritics(std::string_view s, const CodepointSet& diacritics);
std::string strip_diacritics(std::string_view s);

// Collapses runs of Unicode White_Space to one U+0020 and trims the ends.
std::string canonicalize_whitespace(std::string_view s);

struct Violation {
  std::size_t index = 0;  // codepoint index
  char32_t codepoint = 0;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;
};

ValidationReport validate_script(std::string_view s, const ScriptClass& expected,
                                 const ScriptClass& neutral);

// The configured normalization pipeline applied to every text field:
// NFC, whitespace canonicalisation, variant folding, and optional
// diacritic stripping.
class Normalizer {
 public:
  Normalizer();
  explicit Normalizer(const Config& config);

  std::string normalize(std::string_view s) const;

  const VariantMap& variants() const { return variants_; }
  const CodepointSet& diacritics() const { return diacritics_; }
  const ScriptTable& scripts() const { return scripts_; }
  bool strips_diacritics() const { return strip_; }

 private:
  VariantMap variants_;
  CodepointSet diacritics_;
  ScriptTable scripts_;
  bool strip_ = false;
};

}  // namespace translit::textnorm
