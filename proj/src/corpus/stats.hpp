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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "corpus/corpus.hpp"
#include "corpus/split.hpp"

namespace translit::corpus {

struct LengthStats {
  std::size_t count = 0;
  // Empty when count is zero.
  std::optional<double> mean;
  std::optional<double> stddev;  // population
};

LengthStats length_stats(std::span<const std::size_t> lengths);

struct SplitStats {
  std::size_t pairs = 0;
  LengthStats tajik;
  LengthStats persian;
};

struct PosCount {
  PosLabel label = PosLabel::kUnknown;
  std::size_t count = 0;
  double share = 0.0;  // percent of all records
};

struct CorpusStats {
  std::array<SplitStats, 3> splits;
  std::size_t total = 0;
  std::size_t unique_tajik = 0;
  std::size_t unique_persian = 0;
  std::array<PosCount, kPosLabelCount> pos;
  std::size_t labeled_total = 0;
  double labeled_share = 0.0;
};

SplitStats split_stats(std::span<const LexiconRecord> records);

// POS histogram and unique counts come from `all` (the pre-split corpus).
CorpusStats corpus_stats(std::span<const LexiconRecord> all, const SplitBundle* bundle);

Json stats_to_json(const CorpusStats& stats, bool with_splits);

// Aligned-text renderings of the split and POS tables.
std::string render_split_table(const CorpusStats& stats);
std::string render_pos_table(const CorpusStats& stats);

}  // namespace translit::corpus
