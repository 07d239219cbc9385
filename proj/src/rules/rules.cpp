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

#include "rules/rules.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <unicode/uchar.h>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "config/config.hpp"
#include "corpus/corpus.hpp"
#include "textnorm/utf8.hpp"
#include "translit_embedded_data.hpp"

namespace translit::rules {

struct PrefixTrie::Node {
  std::map<char32_t, std::unique_ptr<Node>> children;
  std::optional<std::u32string> payload;
};

PrefixTrie::PrefixTrie() : root_(std::make_unique<Node>()) {}
PrefixTrie::~PrefixTrie() = default;
PrefixTrie::PrefixTrie(PrefixTrie&&) noexcept = default;
PrefixTrie& PrefixTrie::operator=(PrefixTrie&&) noexcept = default;

bool PrefixTrie::insert(std::u32string_view source, std::u32string target) {
  Node* n = root_.get();
  for (char32_t c : source) {
    auto& child = n->children[c];
    if (!child) child = std::make_unique<Node>();
    n = child.get();
  }
  if (n->payload) return false;
  n->payload = std::move(target);
  ++entries_;
  return true;
}

std::size_t PrefixTrie::longest_match(std::u32string_view s, std::size_t pos,
                                      const std::u32string** target) const {
  const Node* n = root_.get();
  std::size_t best = 0;
  for (std::size_t i = pos; i < s.size(); ++i) {
    auto it = n->children.find(s[i]);
    if (it == n->children.end()) break;
    n = it->second.get();
    if (n->payload) {
      best = i - pos + 1;
      if (target) *target = &*n->payload;
    }
  }
  return best;
}

const std::u32string* PrefixTrie::find(std::u32string_view source) const {
  const Node* n = root_.get();
  for (char32_t c : source) {
    auto it = n->children.find(c);
    if (it == n->children.end()) return nullptr;
    n = it->second.get();
  }
  return n->payload ? &*n->payload : nullptr;
}

std::vector<std::size_t> PrefixTrie::payload_depths() const {
  std::vector<std::size_t> out;
  std::function<void(const Node*, std::size_t)> walk = [&](const Node* n, std::size_t d) {
    if (n->payload) out.push_back(d);
    for (const auto& [c, child] : n->children) walk(child.get(), d + 1);
  };
  walk(root_.get(), 0);
  std::sort(out.begin(), out.end());
  return out;
}

PrefixTrie build_trie(std::span<const corpus::LexiconRecord> train) {
  PrefixTrie t;
  for (const auto& r : train) t.insert(utf8::decode(r.tajik), utf8::decode(r.persian));
  return t;
}

CharMap CharMap::parse(std::string_view text) {
  CharMap m;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) fail(ErrorKind::kConfig, "charmap line " + std::to_string(lineno) + ": expected SRC<TAB>DST");
    const std::u32string src = utf8::decode(line.substr(0, tab));
    if (src.size() != 1) fail(ErrorKind::kConfig, "charmap line " + std::to_string(lineno) + ": source must be one character");
    if (!m.map_.emplace(src[0], utf8::decode(line.substr(tab + 1))).second) {
      fail(ErrorKind::kConfig, "charmap line " + std::to_string(lineno) + ": duplicate source");
    }
  }
  return m;
}

CharMap CharMap::builtin() { return parse(embedded::kCharMap); }

CharMap CharMap::from_config(const Config& config) {
  if (auto p = config.get_path("rules.charmap")) return parse(read_file(*p));
  return builtin();
}

const std::u32string* CharMap::lookup(char32_t c) const {
  auto it = map_.find(c);
  return it == map_.end() ? nullptr : &it->second;
}

bool CharMap::covers(std::u32string_view alphabet, std::u32string* missing) const {
  bool ok = true;
  for (char32_t c : alphabet) {
    if (c == U' ') continue;
    if (!map_.count(c)) {
      ok = false;
      if (missing) *missing += c;
    }
  }
  return ok;
}

namespace {

bool is_word_char(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) == 0 && c != U'-'; }

bool at_boundary(std::u32string_view s, std::size_t i) {
  return i == 0 || i >= s.size() || !is_word_char(s[i - 1]) || !is_word_char(s[i]);
}

}  // namespace

std::u32string transliterate(std::u32string_view s, const PrefixTrie& trie, const CharMap& cmap,
                             const RuleOptions& options) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::u32string* target = nullptr;
    std::size_t n = 0;
    if (!options.boundary_aware) {
      n = trie.longest_match(s, i, &target);
    } else if (at_boundary(s, i)) {
      for (std::size_t len = trie.longest_match(s, i, nullptr); len > 0; --len) {
        if (at_boundary(s, i + len) && (target = trie.find(s.substr(i, len)))) {
          n = len;
          break;
        }
      }
    }
    if (n > 0) {
      out += *target;
      i += n;
      continue;
    }
    if (const std::u32string* m = cmap.lookup(s[i])) {
      out += *m;
    } else if (const std::u32string* lower = cmap.lookup(static_cast<char32_t>(u_tolower(static_cast<UChar32>(s[i]))))) {
      out += *lower;
    } else {
      out += s[i];
    }
    ++i;
  }
  return out;
}

std::string transliterate(std::string_view s, const PrefixTrie& trie, const CharMap& cmap,
                          const RuleOptions& options) {
  return utf8::encode(transliterate(std::u32string_view(utf8::decode(s)), trie, cmap, options));
}

std::vector<MinedLetter> mine_letter_map(std::span<const std::pair<std::string, std::string>> pairs,
                                         std::size_t min_count) {
  std::map<char32_t, std::size_t> src_df;
  std::map<char32_t, std::size_t> tgt_df;
  std::map<std::pair<char32_t, char32_t>, std::size_t> joint;
  for (const auto& [s, t] : pairs) {
    const auto su = utf8::decode(s);
    const auto tu = utf8::decode(t);
    const std::set<char32_t> ss(su.begin(), su.end());
    const std::set<char32_t> ts(tu.begin(), tu.end());
    for (char32_t a : ss) ++src_df[a];
    for (char32_t b : ts) ++tgt_df[b];
    for (char32_t a : ss)
      for (char32_t b : ts) ++joint[{a, b}];
  }
  std::vector<MinedLetter> out;
  for (const auto& [a, na] : src_df) {
    if (na < min_count || a == U' ') continue;
    MinedLetter best{a, 0, -1.0, na};
    for (const auto& [b, nb] : tgt_df) {
      auto it = joint.find({a, b});
      if (it == joint.end()) continue;
      const double d = 2.0 * static_cast<double>(it->second) / static_cast<double>(na + nb);
      if (d > best.dice) {
        best.dice = d;
        best.target = b;
      }
    }
    if (best.dice > 0) out.push_back(best);
  }
  return out;
}

}  // namespace translit::rules
