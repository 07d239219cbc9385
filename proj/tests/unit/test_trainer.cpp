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

#include <algorithm>
#include <stdexcept>

#include "common/error.hpp"
#include "config/config.hpp"
#include "corpus/synthetic.hpp"
#include "models/model.hpp"
#include "test_util.hpp"
#include "trainer/trainer.hpp"

using namespace translit;
using namespace translit::trainer;

namespace {

bool stops(std::vector<double> v, std::size_t patience) { return early_stop_check(v, patience); }

struct Toy {
  std::vector<StringPair> pairs;
  vocab::VocabPair vocab;
};

Toy toy(std::size_t n) {
  Toy t;
  for (const auto& r : corpus::cipher_corpus(n, 42)) t.pairs.emplace_back(r.tajik, r.persian);
  t.vocab = vocab::build_vocab(t.pairs);
  return t;
}

std::unique_ptr<models::Seq2Seq<float>> tiny(const Toy& t) {
  models::TransformerConfig c;
  c.layers = 1;
  c.d_model = 16;
  c.heads = 2;
  c.d_ff = 32;
  c.dropout = 0.1;
  c.max_len = 32;
  return models::make_model<float>("transformer", c.to_json(), t.vocab.source.size(), t.vocab.target.size());
}

TrainConfig quick(std::size_t epochs) {
  TrainConfig c;
  c.max_epochs = epochs;
  c.patience = epochs;
  c.batch_size = 8;
  c.adam.lr = 3e-3;
  c.decode_max_len = 20;
  return c;
}

}  // namespace

TEST(EarlyStop, HandTrace) {
  const std::vector<double> seq{0.5, 0.4, 0.41, 0.42, 0.43, 0.44, 0.45};
  EarlyStopping s(5);
  std::size_t stopped_after = 0;
  for (double c : seq) {
    if (s.observe(c)) {
      stopped_after = s.epochs();
      break;
    }
  }
  EXPECT_EQ(stopped_after, 7u);
  EXPECT_EQ(s.best_epoch(), 2u);
  EXPECT_DOUBLE_EQ(s.best_cer(), 0.4);
}

TEST(EarlyStop, Rules) {
  EXPECT_FALSE(stops({0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3}, 5));
  EXPECT_TRUE(stops({0.5, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4}, 5));
  EXPECT_FALSE(stops({0.5, 0.4, 0.4, 0.4, 0.4, 0.4}, 5));
  EXPECT_FALSE(stops({0.5, 0.4, 0.41, 0.42, 0.43, 0.39, 0.45}, 5));
  EXPECT_FALSE(stops({0.5}, 5));
}

TEST(EarlyStop, ImprovingEveryEpochRunsToTheEnd) {
  EarlyStopping s(5);
  for (int e = 0; e < 20; ++e) EXPECT_FALSE(s.observe(1.0 - 0.01 * e));
  EXPECT_EQ(s.best_epoch(), 20u);
}

TEST(Batches, Sizes) {
  auto b = make_batches(100, 64, 42, 1);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].size(), 64u);
  EXPECT_EQ(b[1].size(), 36u);
  EXPECT_THROW(make_batches(10, 0, 1, 1), Error);
}

TEST(Batches, DeterministicPermutations) {
  auto flat = [](const std::vector<std::vector<std::size_t>>& b) {
    std::vector<std::size_t> v;
    for (const auto& x : b) v.insert(v.end(), x.begin(), x.end());
    return v;
  };
  const auto a = flat(make_batches(50, 8, 42, 3));
  EXPECT_EQ(a, flat(make_batches(50, 8, 42, 3)));
  const auto c = flat(make_batches(50, 8, 42, 4));
  EXPECT_NE(a, c);
  auto sa = a, sc = c;
  std::sort(sa.begin(), sa.end());
  std::sort(sc.begin(), sc.end());
  EXPECT_EQ(sa, sc);
  EXPECT_EQ(sa.front(), 0u);
  EXPECT_EQ(sa.back(), 49u);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.patience = 25;
  try {
    c.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  TrainConfig d;
  d.adam.lr = 0;
  EXPECT_THROW(d.validate(), Error);
  EXPECT_EQ(TrainConfig::from_config(Config()).to_json(), TrainConfig().to_json());
}

TEST(History, JsonHasNoWallClock) {
  TrainHistory h;
  h.epochs.push_back({1, 2.0, 1.5, 0.5, 0.1, 3.25, true});
  h.best_epoch = 1;
  h.best_cer = 0.5;
  h.stop_reason = "max-epochs";
  const auto j = h.to_json();
  EXPECT_EQ(j.dump().find("seconds"), std::string::npos);
  EXPECT_EQ(TrainHistory::from_json(j).to_json(), j);
  EXPECT_NE(h.timing_json().dump().find("3.25"), std::string::npos);
}

TEST(Train, RunsAndRecordsHistory) {
  auto t = toy(24);
  auto m = tiny(t);
  std::vector<std::size_t> seen;
  TrainOptions o;
  o.on_epoch = [&](const EpochRecord& r) { seen.push_back(r.epoch); };
  auto res = train(*m, t.vocab, t.pairs, t.pairs, quick(3), o);
  EXPECT_EQ(res.history.epochs.size(), 3u);
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(res.history.stop_reason, "max-epochs");
  const auto& e = res.history.epochs;
  const auto best = std::min_element(e.begin(), e.end(), [](auto& a, auto& b) { return a.valid_cer < b.valid_cer; });
  EXPECT_EQ(res.history.best_epoch, best->epoch);
  EXPECT_LT(e.back().train_loss, e.front().train_loss);
}

TEST(Train, DeterministicAndResumable) {
  auto t = toy(24);
  tltest::TempDir full("full"), part("part");
  TrainOptions o1;
  o1.out_dir = full.path();
  auto m1 = tiny(t);
  auto r1 = train(*m1, t.vocab, t.pairs, t.pairs, quick(4), o1);

  // Same run, interrupted after epoch 2, then resumed.
  TrainOptions o2;
  o2.out_dir = part.path();
  o2.on_epoch = [](const EpochRecord& r) {
    if (r.epoch == 2) throw std::runtime_error("interrupt");
  };
  auto m2 = tiny(t);
  EXPECT_THROW(train(*m2, t.vocab, t.pairs, t.pairs, quick(4), o2), std::runtime_error);
  TrainOptions o3;
  o3.out_dir = part.path();
  o3.resume = part.path() / "last.ckpt";
  auto m3 = tiny(t);
  auto r3 = train(*m3, t.vocab, t.pairs, t.pairs, quick(4), o3);

  EXPECT_EQ(r1.history.to_json(), r3.history.to_json());
  EXPECT_EQ(r1.best.serialize(), r3.best.serialize());
  EXPECT_EQ(tltest::slurp(full / "last.ckpt"), tltest::slurp(part / "last.ckpt"));
  EXPECT_EQ(tltest::slurp(full / "best.ckpt"), tltest::slurp(part / "best.ckpt"));

  // A rerun from scratch is bit-identical.
  auto m4 = tiny(t);
  auto r4 = train(*m4, t.vocab, t.pairs, t.pairs, quick(4));
  EXPECT_EQ(r1.history.to_json(), r4.history.to_json());
  EXPECT_EQ(r1.best.serialize(), r4.best.serialize());

  // Resuming under a different configuration is refused.
  TrainOptions o5;
  o5.resume = full.path() / "last.ckpt";
  auto cfg = quick(4);
  cfg.adam.lr = 1e-2;
  auto m5 = tiny(t);
  EXPECT_THROW(train(*m5, t.vocab, t.pairs, t.pairs, cfg, o5), Error);
}

TEST(Train, NonFiniteLossAborts) {
  auto t = toy(16);
  auto m = tiny(t);
  auto cfg = quick(2);
  cfg.adam.lr = 1e30;
  cfg.clip_norm = 1e30;
  try {
    train(*m, t.vocab, t.pairs, t.pairs, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
  }
}

TEST(Greedy, EmptySourceTerminates) {
  auto t = toy(16);
  auto m = tiny(t);
  m->init(1, 0.02);
  std::vector<std::string> src{"", "аб"};
  auto out = greedy_transliterate(*m, t.vocab, src, 5);
  EXPECT_EQ(out.size(), 2u);
}
