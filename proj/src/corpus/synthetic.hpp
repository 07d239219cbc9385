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
#include <string>
#include <utility>
#include <vector>

#include "corpus/corpus.hpp"

namespace translit::corpus {

// Deterministic substitution cipher over the Tajik alphabet: a letter
// bijection into Perso-Arabic letters plus ten Cyrillic bigram rules, each
// emitting one Arabic Supplement letter. Rules apply by longest match.
class Cipher {
 public:
  Cipher();

  std::string encode(const std::string& tajik) const;

  const std::vector<std::pair<std::u32string, std::u32string>>& rules() const { return rules_; }
  const std::u32string& letters() const { return letters_; }

 private:
  std::u32string letters_;
  std::vector<std::pair<std::u32string, std::u32string>> rules_;  // bigrams first
};

// `count` distinct words of 2 to 6 units, POS drawn uniformly from the four
// major classes.
std::vector<LexiconRecord> cipher_corpus(std::size_t count, std::uint64_t seed);

// Synthetic corpus of `count` records whose POS mix follows `pos_counts`
// (scaled by largest remainder to `count`). Text is cipher-generated.
std::vector<LexiconRecord> synthetic_pos_corpus(std::size_t count,
                                                const std::vector<std::pair<PosLabel, std::size_t>>& pos_counts,
                                                std::uint64_t seed);

}  // namespace translit::corpus
