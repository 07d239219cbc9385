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

#include "vocab/vocab.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "textnorm/utf8.hpp"

namespace translit::vocab {
namespace {

constexpr const char* kSpecialNames[kNumSpecials] = {"<pad>", "<sos>", "<eos>", "<unk>"};

}  // namespace

CharVocab::CharVocab() = default;

CharVocab CharVocab::from_chars(std::u32string chars) {
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  CharVocab v;
  v.chars_ = std::move(chars);
  for (std::size_t i = 0; i < v.chars_.size(); ++i) {
    v.ids_[v.chars_[i]] = static_cast<std::int32_t>(i) + kNumSpecials;
  }
  return v;
}

std::int32_t CharVocab::id_of(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnk : it->second;
}

char32_t CharVocab::char_of(std::int32_t id) const {
  if (id < kNumSpecials || id >= size()) fail(ErrorKind::kInvalidArgument, "vocab id " + std::to_string(id) + " has no character");
  return chars_[static_cast<std::size_t>(id - kNumSpecials)];
}

std::vector<std::int32_t> CharVocab::encode(std::string_view s) const {
  const std::u32string cps = utf8::decode(s);
  std::vector<std::int32_t> ids;
  ids.reserve(cps.size() + 2);
  ids.push_back(kSos);
  for (char32_t c : cps) ids.push_back(id_of(c));
  ids.push_back(kEos);
  return ids;
}

std::string CharVocab::decode(std::span<const std::int32_t> ids) const {
  std::string out;
  for (std::int32_t id : ids) {
    if (id < 0 || id >= size()) fail(ErrorKind::kInvalidArgument, "vocab id " + std::to_string(id) + " out of range");
    if (id == kEos) break;
    if (id == kUnk) {
      utf8::append(out, kUnkGlyph);
    } else if (id >= kNumSpecials) {
      utf8::append(out, chars_[static_cast<std::size_t>(id - kNumSpecials)]);
    }
  }
  return out;
}

std::string CharVocab::serialize() const {
  std::string out;
  for (const char* s : kSpecialNames) {
    out += s;
    out += '\n';
  }
  for (char32_t c : chars_) {
    utf8::append(out, c);
    out += '\n';
  }
  return out;
}

CharVocab CharVocab::parse(std::string_view text) {
  std::u32string chars;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view item = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line < kNumSpecials) {
      if (item != kSpecialNames[line]) fail(ErrorKind::kParse, "vocab line " + std::to_string(line) + ": expected " + kSpecialNames[line]);
    } else {
      const std::u32string cps = utf8::decode(item);
      if (cps.size() != 1) fail(ErrorKind::kParse, "vocab line " + std::to_string(line) + ": expected one character");
      if (!chars.empty() && cps[0] <= chars.back()) fail(ErrorKind::kParse, "vocab characters must be in ascending codepoint order");
      chars += cps[0];
    }
    ++line;
  }
  if (line < kNumSpecials) fail(ErrorKind::kParse, "vocab: missing special tokens");
  return from_chars(std::move(chars));
}

VocabPair build_vocab(std::span<const std::pair<std::string, std::string>> train_pairs) {
  if (train_pairs.empty()) fail(ErrorKind::kInvalidArgument, "cannot build a vocabulary from an empty training set");
  std::set<char32_t> src, tgt;
  for (const auto& [s, t] : train_pairs) {
    for (char32_t c : utf8::decode(s)) src.insert(c);
    for (char32_t c : utf8::decode(t)) tgt.insert(c);
  }
  return {CharVocab::from_chars(std::u32string(src.begin(), src.end())),
          CharVocab::from_chars(std::u32string(tgt.begin(), tgt.end()))};
}

}  // namespace translit::vocab
