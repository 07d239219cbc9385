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
#include <numeric>

#include "autograd/checkpoint.hpp"
#include "autograd/ops.hpp"
#include "autograd/optim.hpp"
#include "common/error.hpp"
#include "op_cases.hpp"

using namespace translit;
using namespace translit::ag;

namespace {

Var<double> t(Shape s, std::vector<double> v, bool grad = false) { return make_tensor<double>(std::move(s), std::move(v), grad); }

}  // namespace

TEST(Ops, SoftmaxUniform) {
  Graph<double> g;
  auto y = softmax(g, t({1, 3}, {0, 0, 0}));
  for (double p : y->value) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(Ops, MatmulIdentity) {
  Graph<double> g;
  auto a = t({2, 3}, {1, 2, 3, 4, 5, 6});
  auto y = matmul(g, t({2, 2}, {1, 0, 0, 1}), a);
  EXPECT_EQ(y->value, a->value);
}

TEST(Ops, ShapeMismatchNamesOp) {
  Graph<double> g;
  try {
    matmul(g, t({2, 3}, std::vector<double>(6)), t({2, 3}, std::vector<double>(6)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
  }
}

TEST(Ops, LayerNormMomentsPreAffine) {
  Graph<double> g;
  auto y = layer_norm(g, t({1, 3}, {1, 2, 3}), t({3}, {1, 1, 1}), t({3}, {0, 0, 0}));
  const double mean = (y->value[0] + y->value[1] + y->value[2]) / 3;
  double var = 0;
  for (double v : y->value) var += (v - mean) * (v - mean);
  var /= 3;
  EXPECT_NEAR(mean, 0.0, 1e-6);
  EXPECT_NEAR(var, 1.0, 1e-6);
}

TEST(Ops, EmbeddingRejectsOutOfRange) {
  Graph<double> g;
  const std::vector<std::int32_t> ids{0, 3};
  EXPECT_THROW(embedding(g, t({3, 2}, std::vector<double>(6)), ids), Error);
}

TEST(Ops, DropoutIdentityAtZero) {
  Graph<double> g;
  Rng rng(1);
  auto x = t({2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(dropout(g, x, 0.0, rng)->value, x->value);
}

TEST(Ops, AttentionWeightsRespectMask) {
  Graph<double> g;
  Rng rng(3);
  auto q = tltest::randn(rng, {3, 4}, 1.0, false), k = tltest::randn(rng, {3, 4}, 1.0, false);
  const std::vector<AttnSegment> segs{{0, 3, 0, 3, 0}};
  std::vector<double> w;
  attention(g, q, k, k, 1, segs, &w);
  ASSERT_EQ(w.size(), 9u);
  EXPECT_DOUBLE_EQ(w[1], 0.0);
  EXPECT_DOUBLE_EQ(w[2], 0.0);
  EXPECT_DOUBLE_EQ(w[5], 0.0);
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(w[3 * r] + w[3 * r + 1] + w[3 * r + 2], 1.0, 1e-12);
}

TEST(CrossEntropy, UniformLogits) {
  for (double eps : {0.0, 0.1}) {
    Graph<double> g;
    const std::vector<std::int32_t> tg{2};
    auto l = cross_entropy(g, t({1, 4}, {0, 0, 0, 0}), tg, eps, -1);
    EXPECT_NEAR(l->value[0], std::log(4.0), 1e-12);
  }
}

TEST(CrossEntropy, ConfidentCorrectIsNearZero) {
  Graph<double> g;
  const std::vector<std::int32_t> tg{1};
  auto l = cross_entropy(g, t({1, 3}, {0, 50, 0}), tg, 0.0, -1);
  EXPECT_LT(l->value[0], 1e-20);
}

TEST(CrossEntropy, ScalarOracle) {
  const std::vector<double> x{1.0, -0.5, 0.25, 2.0, 0.1, -1.0};
  const std::vector<std::int32_t> tg{0, 2};  // first row ignored
  const double eps = 0.1;
  Graph<double> g;
  auto l = cross_entropy(g, t({2, 3}, x), tg, eps, 0);
  const double a = 2.0, b = 0.1, c = -1.0;
  const double lse = std::log(std::exp(a) + std::exp(b) + std::exp(c));
  const double expected = -((eps / 2) * (a - lse) + (eps / 2) * (b - lse) + (1 - eps) * (c - lse));
  EXPECT_NEAR(l->value[0], expected, 1e-12);
}

TEST(CrossEntropy, AllPaddingIsError) {
  Graph<double> g;
  const std::vector<std::int32_t> tg{0, 0};
  EXPECT_THROW(cross_entropy(g, t({2, 3}, std::vector<double>(6)), tg, 0.1, 0), Error);
}

TEST(Backward, SumGivesOnes) {
  auto x = t({2, 3}, {1, -2, 3, 4, 5, 6}, true);
  Graph<double> g;
  g.backward(sum(g, x));
  EXPECT_EQ(x->grad, std::vector<double>(6, 1.0));
}

TEST(Backward, DotGivesTwoX) {
  auto x = t({3}, {1.5, -2, 0.25}, true);
  Graph<double> g;
  g.backward(sum(g, mul(g, x, x)));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x->grad[i], 2 * x->value[i]);
}

TEST(Backward, TwiceIsError) {
  auto x = t({1}, {2.0}, true);
  Graph<double> g;
  auto y = sum(g, x);
  g.backward(y);
  try {
    g.backward(y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(Backward, RandomGraphMatchesFiniteDifferences) {
  Rng rng(11);
  auto a = tltest::randn(rng, {3, 4}), b = tltest::randn(rng, {4, 2}), bias = tltest::randn(rng, {2});
  auto r = tltest::grad_check(
      [&](Graph<double>& g) {
        auto h = tanh(g, linear(g, a, b, bias));
        return sum(g, mul(g, softmax(g, h), sigmoid(g, h)));
      },
      {a, b, bias});
  EXPECT_LT(r.max_rel, 1e-4);
}

class OpGradient : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OpGradient, CentralDifferences) {
  const auto cases = tltest::op_cases();
  const auto& c = cases.at(GetParam());
  auto r = c.run(2024);
  EXPECT_LT(r.max_rel, 1e-4) << c.name;
  EXPECT_GT(r.checked, 0u);
}

INSTANTIATE_TEST_SUITE_P(All, OpGradient, ::testing::Range<std::size_t>(0, tltest::op_cases().size()),
                         [](const ::testing::TestParamInfo<std::size_t>& info) {
                           return tltest::op_cases().at(info.param).name;
                         });

TEST(Clip, Cases) {
  auto p = make_tensor<double>({2}, {0, 0}, true);
  p->grad = {3, 4};
  std::vector<Var<double>> ps{p};
  EXPECT_DOUBLE_EQ(clip_global_norm(ps, 1.0), 5.0);
  EXPECT_NEAR(p->grad[0], 0.6, 1e-15);
  EXPECT_NEAR(p->grad[1], 0.8, 1e-15);

  p->grad = {0.3, 0.4};
  clip_global_norm(ps, 1.0);
  EXPECT_EQ(p->grad, (std::vector<double>{0.3, 0.4}));

  p->grad = {0, 0};
  EXPECT_DOUBLE_EQ(clip_global_norm(ps, 1.0), 0.0);
  EXPECT_EQ(p->grad, (std::vector<double>{0, 0}));
}

TEST(AdamW, NoGradNoDecayIsNoop) {
  auto p = make_tensor<double>({1}, {0.7}, true);
  p->grad = {0};
  AdamW<double> opt({p}, {1e-3, 0.9, 0.98, 1e-8, 0.0});
  opt.step();
  EXPECT_DOUBLE_EQ(p->value[0], 0.7);
}

TEST(AdamW, ScalarRecurrence) {
  const double lr = 1e-2, b1 = 0.9, b2 = 0.98, eps = 1e-8, wd = 0.01;
  auto p = make_tensor<double>({1}, {0.5}, true);
  AdamW<double> opt({p}, {lr, b1, b2, eps, wd});
  double x = 0.5, m = 0, v = 0;
  const double grads[] = {0.3, -1.2, 0.05};
  for (int k = 0; k < 3; ++k) {
    p->grad = {grads[k]};
    opt.step();
    const int tt = k + 1;
    x -= lr * wd * x;
    m = b1 * m + (1 - b1) * grads[k];
    v = b2 * v + (1 - b2) * grads[k] * grads[k];
    const double mh = m / (1 - std::pow(b1, tt)), vh = v / (1 - std::pow(b2, tt));
    x -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(p->value[0], x, 1e-12) << "step " << tt;
  }
  EXPECT_EQ(opt.steps(), 3u);
}

TEST(AdamW, DecoupledDecay) {
  const double lr = 1e-2, wd = 0.1;
  auto p = make_tensor<double>({1}, {2.0}, true);
  p->grad = {0};
  AdamW<double> opt({p}, {lr, 0.9, 0.98, 1e-8, wd});
  opt.step();
  EXPECT_NEAR(p->value[0], 2.0 - lr * wd * 2.0, 1e-15);
}

TEST(Checkpoint, RoundTrip) {
  ParamStore<float> ps;
  auto w = ps.add("w", {2, 3});
  for (std::size_t i = 0; i < 6; ++i) w->value[i] = 0.5f * static_cast<float>(i);
  ps.alias("w_tied", "w");
  Checkpoint ck;
  ck.arch = "test-arch";
  ck.config = {{"a", 1}};
  ck.source_vocab = "<pad>\n<sos>\n<eos>\n<unk>\n";
  ck.target_vocab = ck.source_vocab;
  store_params(ps, ck);
  EXPECT_EQ(ck.blocks.size(), 1u);
  auto back = Checkpoint::parse(ck.serialize());
  EXPECT_EQ(back.arch, "test-arch");
  EXPECT_EQ(back.serialize(), ck.serialize());

  ParamStore<float> ps2;
  ps2.add("w", {2, 3});
  restore_params(ps2, back);
  EXPECT_EQ(ps2.get("w")->value, w->value);

  ParamStore<float> wrong;
  wrong.add("w", {3, 2});
  EXPECT_THROW(restore_params(wrong, back), Error);
  EXPECT_THROW(Checkpoint::parse("garbage"), Error);
}

TEST(ParamStore, AliasSharesStorage) {
  ParamStore<double> ps;
  ps.add("a", {2});
  ps.alias("b", "a");
  EXPECT_EQ(ps.get("a").get(), ps.get("b").get());
  EXPECT_EQ(ps.count(), 2u);
  EXPECT_EQ(ps.params().size(), 1u);
}
