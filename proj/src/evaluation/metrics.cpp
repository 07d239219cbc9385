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

#include "evaluation/metrics.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include <unicode/uchar.h>

#include "common/error.hpp"
#include "textnorm/textnorm.hpp"
#include "textnorm/utf8.hpp"

namespace translit::evaluation {
namespace {

std::u32string nfc32(std::string_view s) { return utf8::decode(textnorm::nfc_normalize(s)); }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

bool is_ascii_punct(char32_t c) {
  static constexpr std::u32string_view kPuncts = U"!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  return kPuncts.find(c) != std::u32string_view::npos;
}

std::vector<std::u32string> split_words(const std::u32string& s) {
  std::vector<std::u32string> words;
  std::u32string cur;
  for (char32_t c : s) {
    if (is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::vector<std::u32string> chrf_tokens(const std::u32string& s) {
  std::vector<std::u32string> out;
  for (auto& w : split_words(s)) {
    if (w.size() == 1) {
      out.push_back(w);
    } else if (is_ascii_punct(w.back())) {
      out.push_back(w.substr(0, w.size() - 1));
      out.push_back(w.substr(w.size() - 1));
    } else if (is_ascii_punct(w.front())) {
      out.push_back(w.substr(0, 1));
      out.push_back(w.substr(1));
    } else {
      out.push_back(w);
    }
  }
  return out;
}

using Counts = std::map<std::u32string, std::size_t>;

Counts char_ngrams(const std::u32string& s, int n) {
  Counts c;
  const auto N = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + N <= s.size(); ++i) ++c[s.substr(i, N)];
  return c;
}

Counts word_ngrams(const std::vector<std::u32string>& toks, int n) {
  Counts c;
  const auto N = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + N <= toks.size(); ++i) {
    std::u32string key;
    for (std::size_t j = 0; j < N; ++j) {
      if (j) key.push_back(U' ');
      key += toks[i + j];
    }
    ++c[key];
  }
  return c;
}

struct OrderStats {
  std::size_t hyp = 0, ref = 0, match = 0;
};

OrderStats match_stats(const Counts& h, const Counts& r) {
  OrderStats s;
  for (const auto& [g, n] : h) {
    s.hyp += n;
    if (auto it = r.find(g); it != r.end()) s.match += std::min(n, it->second);
  }
  for (const auto& [g, n] : r) s.ref += n;
  return s;
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(utf8::decode(a), utf8::decode(b));
}

CerValue cer_detail(std::string_view prediction, std::string_view reference) {
  const auto p = nfc32(prediction);
  const auto r = nfc32(reference);
  if (r.empty()) return {static_cast<double>(p.size()), true};
  return {static_cast<double>(levenshtein(p, r)) / static_cast<double>(r.size()), false};
}

double cer(std::string_view prediction, std::string_view reference) {
  return cer_detail(prediction, reference).value;
}

bool exact_match(std::string_view prediction, std::string_view reference) {
  return textnorm::nfc_normalize(prediction) == textnorm::nfc_normalize(reference);
}

double exact_match_rate(std::span<const Pair> items) {
  if (items.empty()) fail(ErrorKind::kInvalidArgument, "exact_match_rate: no items");
  std::size_t hits = 0;
  for (const auto& it : items) hits += exact_match(it.prediction, it.reference) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(items.size());
}

double chrf_pp(std::string_view prediction, std::string_view reference, const ChrfParams& params) {
  const auto hyp = nfc32(prediction);
  const auto ref = nfc32(reference);
  auto squeeze = [](const std::u32string& s) {
    std::u32string out;
    for (char32_t c : s)
      if (!is_space(c)) out.push_back(c);
    return out;
  };
  const auto hc = squeeze(hyp);
  const auto rc = squeeze(ref);
  if (hc.empty() && rc.empty() && split_words(hyp).empty() && split_words(ref).empty()) return 100.0;

  std::vector<OrderStats> stats;
  for (int n = 1; n <= params.char_order; ++n) stats.push_back(match_stats(char_ngrams(hc, n), char_ngrams(rc, n)));
  if (params.word_order > 0) {
    const auto hw = chrf_tokens(hyp);
    const auto rw = chrf_tokens(ref);
    for (int n = 1; n <= params.word_order; ++n) stats.push_back(match_stats(word_ngrams(hw, n), word_ngrams(rw, n)));
  }
  const double factor = params.beta * params.beta;
  double avg_p = 0, avg_r = 0;
  int effective = 0;
  for (const auto& s : stats) {
    if (s.hyp > 0 && s.ref > 0) {
      avg_p += static_cast<double>(s.match) / static_cast<double>(s.hyp);
      avg_r += static_cast<double>(s.match) / static_cast<double>(s.ref);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_p /= effective;
  avg_r /= effective;
  if (avg_p + avg_r == 0) return 0.0;
  return 100.0 * (1 + factor) * avg_p * avg_r / (factor * avg_p + avg_r);
}

double error_score(std::string_view prediction, std::string_view reference) {
  if (exact_match(prediction, reference)) return 0.0;
  return cer(prediction, reference) >= 1.0 ? 1.0 : 0.5;
}

}  // namespace translit::evaluation
