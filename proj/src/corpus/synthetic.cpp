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

#include "corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "textnorm/utf8.hpp"

namespace translit::corpus {
namespace {

constexpr char32_t kTajik[] = U"абвгғдеёжзиӣйкқлмнопрстуӯфхҳчҷшъэюя";
constexpr char32_t kTarget[] = U"اآبپتثجچحخدذرزژسشصضطظعغفقکگلمنوهیءئ";
constexpr const char32_t* kBigrams[] = {U"ст", U"нд", U"ар", U"ош", U"хо", U"ид", U"ав", U"ми", U"рӯ", U"ҷа"};
constexpr char32_t kRuleTargets[] = U"ݐݑݒݓݔݕݖݗݘݙ";

}  // namespace

Cipher::Cipher() : letters_(kTajik) {
  static_assert(std::size(kTajik) == std::size(kTarget));
  for (std::size_t i = 0; i < std::size(kBigrams); ++i) {
    rules_.emplace_back(kBigrams[i], std::u32string(1, kRuleTargets[i]));
  }
  for (std::size_t i = 0; i + 1 < std::size(kTajik); ++i) {
    rules_.emplace_back(std::u32string(1, kTajik[i]), std::u32string(1, kTarget[i]));
  }
}

std::string Cipher::encode(const std::string& tajik) const {
  const std::u32string s = utf8::decode(tajik);
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    bool hit = false;
    for (const auto& [src, dst] : rules_) {
      if (s.compare(i, src.size(), src) == 0) {
        out += dst;
        i += src.size();
        hit = true;
        break;
      }
    }
    if (!hit) fail(ErrorKind::kInvalidArgument, "cipher: character outside the alphabet");
  }
  return utf8::encode(out);
}

std::vector<LexiconRecord> cipher_corpus(std::size_t count, std::uint64_t seed) {
  static const PosLabel kPos[] = {PosLabel::kNoun, PosLabel::kAdjective, PosLabel::kVerb, PosLabel::kAdverb};
  std::vector<LexiconRecord> out;
  const Cipher cipher;
  Rng rng(stream_seed(seed, "cipher-corpus"));
  std::unordered_set<std::string> seen;
  const auto nletters = cipher.letters().size();
  while (out.size() < count) {
    const auto units = 2 + rng.below(5);
    std::u32string w;
    for (std::uint64_t u = 0; u < units; ++u) {
      if (rng.uniform() < 0.3) {
        w += kBigrams[rng.below(std::size(kBigrams))];
      } else {
        w += cipher.letters()[rng.below(nletters)];
      }
    }
    const PosLabel pos = kPos[rng.below(4)];
    std::string src = utf8::encode(w);
    if (!seen.insert(src).second) continue;
    LexiconRecord r;
    r.persian = cipher.encode(src);
    r.tajik = std::move(src);
    r.pos = pos;
    r.source_id = "synthetic-cipher";
    r.line = out.size() + 1;
    r.fields = Json::object();
    r.fields["tajik"] = r.tajik;
    r.fields["persian"] = r.persian;
    r.fields["part-of-speech"] = pos_name(pos);
    r.fields["source"] = r.source_id;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LexiconRecord> synthetic_pos_corpus(std::size_t count,
                                                const std::vector<std::pair<PosLabel, std::size_t>>& pos_counts,
                                                std::uint64_t seed) {
  std::size_t total = 0;
  for (const auto& pc : pos_counts) total += pc.second;
  if (total == 0) fail(ErrorKind::kInvalidArgument, "synthetic corpus: empty POS mix");
  std::vector<std::size_t> n(pos_counts.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pos_counts.size(); ++i) {
    const double q = static_cast<double>(pos_counts[i].second) * static_cast<double>(count) / static_cast<double>(total);
    n[i] = static_cast<std::size_t>(std::floor(q));
    used += n[i];
    rem.emplace_back(-(q - std::floor(q)), i);
  }
  std::sort(rem.begin(), rem.end());
  for (std::size_t k = 0; used < count; ++k, ++used) ++n[rem[k % rem.size()].second];

  std::vector<PosLabel> labels;
  for (std::size_t i = 0; i < n.size(); ++i) labels.insert(labels.end(), n[i], pos_counts[i].first);
  Rng rng(stream_seed(seed, "synthetic-pos"));
  rng.shuffle(std::span<PosLabel>(labels));

  std::vector<LexiconRecord> out = cipher_corpus(count, seed);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].pos = labels[i];
    out[i].fields["part-of-speech"] = labels[i] == PosLabel::kUnknown ? Json(nullptr) : Json(pos_name(labels[i]));
  }
  return out;
}

}  // namespace translit::corpus
