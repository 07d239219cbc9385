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

#include <gtest/gtest.h>

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "decoder/decoder.hpp"
#include "vocab/vocab.hpp"

using namespace translit;
using namespace translit::decoder;

namespace {

constexpr std::int32_t A = 4, B = 5;

// Next-token distributions drawn from a hash of (item, prefix); specials
// other than EOS get probability zero.
class RandomScorer : public Scorer {
 public:
  RandomScorer(std::size_t items, std::size_t vocab, std::size_t max_prefix, std::uint64_t seed)
      : items_(items), vocab_(vocab), max_prefix_(max_prefix), seed_(seed) {}
  std::size_t num_items() const override { return items_; }
  std::size_t vocab_size() const override { return vocab_; }
  std::size_t max_prefix() const override { return max_prefix_; }
  void next_log_probs(std::span<const Query> qs, std::vector<std::vector<double>>& out) override {
    out.clear();
    for (const auto& q : qs) {
      std::uint64_t h = stream_seed(seed_, "rs", q.item);
      for (auto t : q.prefix) h = mix64(h + static_cast<std::uint64_t>(t));
      Rng r(h);
      std::vector<double> w(vocab_, 0.0);
      double z = 0;
      for (std::size_t j = vocab::kEos; j < vocab_; ++j) {
        if (j == static_cast<std::size_t>(vocab::kUnk)) continue;
        w[j] = 0.05 + r.uniform();
        z += w[j];
      }
      std::vector<double> lp(vocab_);
      for (std::size_t j = 0; j < vocab_; ++j) lp[j] = w[j] > 0 ? std::log(w[j] / z) : -INFINITY;
      out.push_back(std::move(lp));
    }
  }

 private:
  std::size_t items_, vocab_, max_prefix_;
  std::uint64_t seed_;
};

std::vector<double> probs(double eos, double a, double b) { return {0, 0, eos, 0, a, b}; }

TableScorer counterexample() {
  TableScorer s(6, 4, probs(0.5, 0.25, 0.25));
  s.set({vocab::kSos}, probs(0.0, 0.55, 0.45));
  s.set({vocab::kSos, A}, probs(0.4, 0.3, 0.3));
  s.set({vocab::kSos, B}, probs(0.9, 0.05, 0.05));
  return s;
}

}  // namespace

TEST(Score, Normalization) {
  EXPECT_DOUBLE_EQ(normalized_score(-2.0, 1, 0.6), -2.0);
  EXPECT_DOUBLE_EQ(normalized_score(-2.0, 4, 0.0), -2.0);
  EXPECT_NEAR(normalized_score(-2.0, 4, 0.6), -0.8706, 1e-4);
  EXPECT_DOUBLE_EQ(normalized_score(-2.0, 4, 0.6), -2.0 / std::pow(4.0, 0.6));
  EXPECT_THROW(normalized_score(-1.0, 0, 0.6), Error);
}

TEST(DecodeConfigTest, Validation) {
  DecodeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beam = 0;
  EXPECT_THROW(c.validate(), Error);
  DecodeConfig d;
  d.max_len = 0;
  EXPECT_THROW(d.validate(), Error);
  DecodeConfig e;
  e.alpha = -1;
  EXPECT_THROW(e.validate(), Error);
}

TEST(Counterexample, GreedyIsSuboptimal) {
  auto s = counterexample();
  DecodeConfig c;
  c.max_len = 3;
  auto g = greedy_decode(s, c);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].best.tokens, (Ids{vocab::kSos, A, vocab::kEos}));
  EXPECT_NEAR(g[0].best.logp, std::log(0.55 * 0.4), 1e-12);
}

TEST(Counterexample, BeamTwoMatchesExhaustive) {
  auto s = counterexample();
  auto oracle = exhaustive_best(s, 3, 0.6);
  EXPECT_EQ(oracle.tokens, (Ids{vocab::kSos, B, vocab::kEos}));
  EXPECT_NEAR(oracle.score, std::log(0.45 * 0.9) / std::pow(2.0, 0.6), 1e-12);
  DecodeConfig c;
  c.beam = 2;
  c.max_len = 3;
  auto r = beam_decode(s, c);
  EXPECT_EQ(r[0].best.tokens, oracle.tokens);
  EXPECT_DOUBLE_EQ(r[0].best.score, oracle.score);
  EXPECT_FALSE(r[0].truncated());
}

TEST(Beam, NbestIsRankedAndBounded) {
  auto s = counterexample();
  DecodeConfig c;
  c.beam = 3;
  c.max_len = 3;
  auto r = beam_decode(s, c);
  ASSERT_LE(r[0].nbest.size(), 3u);
  ASSERT_GE(r[0].nbest.size(), 2u);
  for (std::size_t i = 1; i < r[0].nbest.size(); ++i) EXPECT_GE(r[0].nbest[i - 1].score, r[0].nbest[i].score);
  EXPECT_EQ(r[0].nbest.front().tokens, r[0].best.tokens);
}

TEST(Beam, ScoreNonDecreasingInBeamSize) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::vector<double> prev;
    for (std::size_t k = 1; k <= 6; ++k) {
      RandomScorer s(5, 8, 10, seed);
      DecodeConfig c;
      c.beam = k;
      c.max_len = 9;
      auto r = beam_decode(s, c);
      for (std::size_t i = 0; i < r.size(); ++i)
        if (k > 1) EXPECT_GE(r[i].best.score, prev[i]) << "seed " << seed << " k " << k << " item " << i;
      prev.clear();
      for (const auto& x : r) prev.push_back(x.best.score);
    }
  }
}

TEST(Beam, KOneEqualsGreedyOnRandomScorers) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomScorer s1(7, 9, 12, seed), s2(7, 9, 12, seed);
    DecodeConfig c;
    c.beam = 1;
    c.max_len = 10;
    auto g = greedy_decode(s1, c);
    auto b = beam_decode(s2, c);
    ASSERT_EQ(g.size(), b.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g[i].best.tokens, b[i].best.tokens);
      EXPECT_EQ(g[i].best.logp, b[i].best.logp);
    }
  }
}

TEST(Beam, WideBeamIsExhaustive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomScorer s(1, 7, 8, seed);
    auto oracle = exhaustive_best(s, 4, 0.6);
    DecodeConfig c;
    c.beam = 2000;
    c.max_len = 4;
    auto r = beam_decode(s, c);
    EXPECT_EQ(r[0].best.tokens, oracle.tokens);
    EXPECT_NEAR(r[0].best.score, oracle.score, 1e-12);
  }
}

TEST(Beam, TruncatedWhenNothingFinishes) {
  TableScorer s(6, 10, probs(0.0, 0.6, 0.4));
  DecodeConfig c;
  c.beam = 2;
  c.max_len = 3;
  auto r = beam_decode(s, c);
  EXPECT_TRUE(r[0].truncated());
  EXPECT_EQ(r[0].best.tokens, (Ids{vocab::kSos, A, A, A}));
  auto g = greedy_decode(s, c);
  EXPECT_TRUE(g[0].truncated());
}

TEST(Beam, MaxLenClampedToScorer) {
  TableScorer s(6, 3, probs(0.0, 0.6, 0.4));
  DecodeConfig c;
  c.max_len = 50;
  auto g = greedy_decode(s, c);
  EXPECT_EQ(g[0].best.tokens.size(), 4u);
}

TEST(TableScorerTest, RejectsBadRows) {
  TableScorer s(6, 4, probs(0.5, 0.25, 0.25));
  EXPECT_THROW(s.set({vocab::kSos}, {0.5, 0.5}), Error);
}
