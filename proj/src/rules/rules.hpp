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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace translit {
class Config;
namespace corpus {
struct LexiconRecord;
}
}  // namespace translit

namespace translit::rules {

class PrefixTrie {
 public:
  PrefixTrie();
  ~PrefixTrie();
  PrefixTrie(PrefixTrie&&) noexcept;
  PrefixTrie& operator=(PrefixTrie&&) noexcept;

  // The first insertion of a source string wins; returns false for repeats.
  bool insert(std::u32string_view source, std::u32string target);

  // Length of the longest payload-carrying prefix of s[pos..], or 0.
  std::size_t longest_match(std::u32string_view s, std::size_t pos, const std::u32string** target) const;
  const std::u32string* find(std::u32string_view source) const;

  std::size_t entry_count() const { return entries_; }
  // Deepest node with a payload, per source depth; for structure checks.
  std::vector<std::size_t> payload_depths() const;

 private:
  struct Node;
  std::unique_ptr<Node> root_;
  std::size_t entries_ = 0;
};

PrefixTrie build_trie(std::span<const corpus::LexiconRecord> train);

class CharMap {
 public:
  CharMap() = default;
  // SRC<TAB>DST lines; '#' comments. DST may be empty.
  static CharMap parse(std::string_view text);
  static CharMap builtin();
  static CharMap from_config(const Config& config);

  // Nullptr for unmapped characters.
  const std::u32string* lookup(char32_t c) const;
  bool covers(std::u32string_view alphabet, std::u32string* missing = nullptr) const;
  std::size_t size() const { return map_.size(); }
  const std::map<char32_t, std::u32string>& entries() const { return map_; }

 private:
  std::map<char32_t, std::u32string> map_;
};

struct RuleOptions {
  // Trie matches must start and end at word boundaries.
  bool boundary_aware = false;
};

std::u32string transliterate(std::u32string_view s, const PrefixTrie& trie, const CharMap& cmap,
                             const RuleOptions& options = {});
std::string transliterate(std::string_view s, const PrefixTrie& trie, const CharMap& cmap,
                          const RuleOptions& options = {});

class RuleTransliterator {
 public:
  RuleTransliterator(PrefixTrie trie, CharMap cmap, RuleOptions options = {})
      : trie_(std::move(trie)), cmap_(std::move(cmap)), options_(options) {}

  std::string operator()(std::string_view s) const { return transliterate(s, trie_, cmap_, options_); }
  const PrefixTrie& trie() const { return trie_; }
  const CharMap& charmap() const { return cmap_; }

 private:
  PrefixTrie trie_;
  CharMap cmap_;
  RuleOptions options_;
};

// Single-letter correspondences mined from aligned word pairs by Dice
// co-occurrence between source letters and target letters. Only letters
// seen at least `min_count` times are reported.
struct MinedLetter {
  char32_t source = 0;
  char32_t target = 0;
  double dice = 0.0;
  std::size_t count = 0;
};
std::vector<MinedLetter> mine_letter_map(std::span<const std::pair<std::string, std::string>> pairs,
                                         std::size_t min_count = 3);

}  // namespace translit::rules
