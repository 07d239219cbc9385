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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace translit::vocab {

inline constexpr std::int32_t kPad = 0;
inline constexpr std::int32_t kSos = 1;
inline constexpr std::int32_t kEos = 2;
inline constexpr std::int32_t kUnk = 3;
inline constexpr std::int32_t kNumSpecials = 4;
inline constexpr char32_t kUnkGlyph = U'�';

// Character table with the four reserved ids first and the remaining
// characters in codepoint order.
class CharVocab {
 public:
  CharVocab();
  static CharVocab from_chars(std::u32string chars);

  std::int32_t size() const { return static_cast<std::int32_t>(chars_.size()) + kNumSpecials; }
  std::int32_t id_of(char32_t c) const;  // kUnk when absent
  bool contains(char32_t c) const { return ids_.count(c) != 0; }
  // Character of a non-special id.
  char32_t char_of(std::int32_t id) const;
  const std::u32string& chars() const { return chars_; }

  // [SOS] + ids + [EOS].
  std::vector<std::int32_t> encode(std::string_view s) const;
  // Drops specials, stops at the first EOS, renders UNK as U+FFFD.
  std::string decode(std::span<const std::int32_t> ids) const;

  // One character per line; lines 0-3 hold <pad> <sos> <eos> <unk>.
  std::string serialize() const;
  static CharVocab parse(std::string_view text);

  bool operator==(const CharVocab& o) const { return chars_ == o.chars_; }

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, std::int32_t> ids_;
};

struct VocabPair {
  CharVocab source;
  CharVocab target;
};

// Throws kInvalidArgument on an empty training set.
VocabPair build_vocab(std::span<const std::pair<std::string, std::string>> train_pairs);

}  // namespace translit::vocab
