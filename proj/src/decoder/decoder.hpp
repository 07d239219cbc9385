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
#include <map>
#include <string>
#include <vector>

#include "decoder/scorer.hpp"

namespace translit::decoder {

struct DecodeConfig {
  std::size_t beam = 3;
  double alpha = 0.6;
  std::size_t max_len = 128;  // generated tokens, EOS included

  void validate() const;
};

struct Hypothesis {
  Ids tokens;  // SOS first; EOS last when finished
  double logp = 0;
  bool finished = false;
  double score = 0;

  // Generated tokens: EOS counts, SOS does not.
  std::size_t length() const { return tokens.empty() ? 0 : tokens.size() - 1; }
};

struct DecodeResult {
  Hypothesis best;
  std::vector<Hypothesis> nbest;  // ranked, best first
  bool truncated() const { return !best.finished; }
};

// logp / length^alpha; length 0 is an error.
double normalized_score(double logp, std::size_t length, double alpha);

// Argmax per step with ties to the lowest id; one result per scorer item.
std::vector<DecodeResult> greedy_decode(Scorer& scorer, const DecodeConfig& cfg);

// Nested beam search over all scorer items at once. Each step, level j of
// k keeps the highest log-probability extension not taken by a lower level
// among the hypotheses of levels 1..j; EOS extensions complete. Level 1 is
// the greedy path, and the hypotheses explored with beam k include those
// explored with any smaller beam. An item stops when no live hypothesis can
// still beat the best completion, or at max_len. At most k results.
std::vector<DecodeResult> beam_decode(Scorer& scorer, const DecodeConfig& cfg);

// Log-probabilities from an explicit table keyed by prefix; prefixes absent
// from the table get `fallback`.
class TableScorer : public Scorer {
 public:
  TableScorer(std::size_t vocab, std::size_t max_prefix, std::vector<double> fallback);

  // `probs` are probabilities (not logs) over the vocabulary.
  void set(const Ids& prefix, const std::vector<double>& probs);

  std::size_t num_items() const override { return 1; }
  std::size_t vocab_size() const override { return vocab_; }
  std::size_t max_prefix() const override { return max_prefix_; }
  void next_log_probs(std::span<const Query> queries, std::vector<std::vector<double>>& out) override;

 private:
  std::size_t vocab_;
  std::size_t max_prefix_;
  std::vector<double> fallback_;
  std::map<Ids, std::vector<double>> table_;
};

// Best finished hypothesis by exhaustive enumeration of every sequence of at
// most max_len generated tokens (item 0 only). Exponential; for tests.
Hypothesis exhaustive_best(Scorer& scorer, std::size_t max_len, double alpha);

}  // namespace translit::decoder
