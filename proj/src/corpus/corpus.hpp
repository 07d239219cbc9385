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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace translit {
class Config;
namespace textnorm {
class Normalizer;
}
}  // namespace translit

namespace translit::corpus {

using Json = nlohmann::ordered_json;

// Controlled POS vocabulary. The order is the row order of the POS
// distribution table and the ordinal used for split tie-breaks.
enum class PosLabel : int {
  kNoun = 0,
  kAdjective,
  kVerb,
  kAdverb,
  kProperNoun,
  kInterjection,
  kNumeral,
  kConjunctionParticle,
  kPreposition,
  kPronoun,
  kAffixParticle,
  kPostposition,
  kUnknown,
};

inline constexpr int kPosLabelCount = 13;

const char* pos_name(PosLabel p);          // "ProperNoun"
const char* pos_display_name(PosLabel p);  // "Proper noun"
std::optional<PosLabel> pos_from_name(std::string_view name);

class PosHarmonizer {
 public:
  // Built-in synonym table.
  PosHarmonizer();
  static PosHarmonizer parse(std::string_view table_text);
  static PosHarmonizer from_config(const Config& config);

  // Unmapped or empty tags give kUnknown.
  PosLabel harmonize(std::string_view raw_tag) const;

 private:
  explicit PosHarmonizer(std::unordered_map<std::string, PosLabel> table) : table_(std::move(table)) {}
  std::unordered_map<std::string, PosLabel> table_;
};

struct RawRecord {
  std::size_t line = 0;  // 1-based line in the source file
  Json fields;
};

struct LexiconRecord {
  std::string tajik;
  std::string persian;
  PosLabel pos = PosLabel::kUnknown;
  std::vector<std::string> examples;
  std::string source_id;
  std::optional<std::string> entry_ref;
  std::optional<std::string> queried_word;
  std::optional<std::uint64_t> freq;
  std::size_t line = 0;
  Json fields;  // every original field, canonical ones rewritten on output
};

// One record per non-empty line. Malformed JSON or a repeated canonical
// field is a kParse error naming the line.
std::vector<RawRecord> parse_jsonl(std::string_view text);
std::vector<RawRecord> load_jsonl(const std::filesystem::path& path);

struct Quarantined {
  RawRecord record;
  std::string reason;  // machine-readable, e.g. "empty-target"
  std::string detail;
};

struct CleanOptions {
  std::size_t max_length = 64;  // codepoints per side
};

struct CleanResult {
  std::vector<LexiconRecord> kept;
  std::vector<Quarantined> quarantined;
};

CleanResult clean(std::span<const RawRecord> records, const textnorm::Normalizer& norm,
                  const PosHarmonizer& pos, const CleanOptions& options = {});

struct DedupResult {
  std::vector<LexiconRecord> records;
  std::size_t removed = 0;
};

// Keeps the first occurrence of each exact (tajik, persian, pos) triplet.
DedupResult dedup(std::vector<LexiconRecord> records);

Json record_to_json(const LexiconRecord& rec);
Json quarantine_to_json(const Quarantined& q);
std::string to_jsonl(std::span<const LexiconRecord> records);

// Reads a cleaned lexicon (prepare/split output) without re-cleaning it.
std::vector<LexiconRecord> read_lexicon(const std::filesystem::path& path,
                                        const PosHarmonizer& pos = PosHarmonizer());
std::vector<LexiconRecord> parse_lexicon(std::string_view text,
                                         const PosHarmonizer& pos = PosHarmonizer());

}  // namespace translit::corpus
