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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"

namespace translit::corpus {

enum SplitId : int { kTrain = 0, kValid = 1, kTest = 2 };
inline constexpr std::array<const char*, 3> kSplitNames = {"train", "valid", "test"};

struct SplitBundle {
  std::array<std::vector<LexiconRecord>, 3> splits;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{};
  // Original record indices per split, ascending.
  std::array<std::vector<std::size_t>, 3> indices;
  // "controlled-rounding" or "per-stratum-largest-remainder".
  std::string method;

  const std::vector<LexiconRecord>& train() const { return splits[kTrain]; }
  const std::vector<LexiconRecord>& valid() const { return splits[kValid]; }
  const std::vector<LexiconRecord>& test() const { return splits[kTest]; }
};

// Largest-remainder apportionment of `total` by `ratios`; ties go to the
// lower index.
std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3>& ratios);

// Per-stratum, per-split cell counts. Global split sizes equal the
// apportionment of the whole corpus, and every cell is the floor or
// ceiling of ratio * stratum size.
struct Allocation {
  std::vector<std::array<std::size_t, 3>> cells;  // indexed by PosLabel ordinal
  std::string method;
};
Allocation allocate(std::span<const std::size_t> stratum_sizes, const std::array<double, 3>& ratios,
                    std::uint64_t seed);

SplitBundle stratified_split(std::span<const LexiconRecord> records, const std::array<double, 3>& ratios,
                             std::uint64_t seed);

Json manifest_to_json(const SplitBundle& bundle);

// Rebuilds the bundle a manifest describes from the same cleaned records.
SplitBundle apply_manifest(std::span<const LexiconRecord> records, const Json& manifest);

}  // namespace translit::corpus
