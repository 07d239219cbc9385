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
#include <span>
#include <string>
#include <string_view>

namespace translit::evaluation {

// Edit distance over codepoints (unit-cost insert, delete, substitute).
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

struct CerValue {
  double value = 0;
  // Empty reference: 0 for an empty prediction, else the prediction length.
  bool degenerate = false;
};

// Both sides are NFC-normalized first.
CerValue cer_detail(std::string_view prediction, std::string_view reference);
double cer(std::string_view prediction, std::string_view reference);

bool exact_match(std::string_view prediction, std::string_view reference);

struct Pair {
  std::string prediction;
  std::string reference;
};
// Empty input is an error.
double exact_match_rate(std::span<const Pair> items);

struct ChrfParams {
  int char_order = 6;
  int word_order = 2;
  double beta = 2.0;
};

// Sentence-level chrF++ on [0, 100]: character n-grams ignore whitespace,
// words are split on whitespace with one leading or trailing ASCII
// punctuation mark separated. Precision and recall are averaged over the
// orders present on both sides before F-beta. Two empty strings give 100.
double chrf_pp(std::string_view prediction, std::string_view reference, const ChrfParams& params = {});

// 0 exact, 0.5 partial (CER below 1), 1 when CER >= 1.
double error_score(std::string_view prediction, std::string_view reference);

}  // namespace translit::evaluation
