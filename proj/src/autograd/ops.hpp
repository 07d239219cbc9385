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

#include <cstdint>
#include <span>
#include <vector>

#include "autograd/tensor.hpp"
#include "common/rng.hpp"

namespace translit::ag {

// C (M x N) = A (M x K) * B (K x N), or C += A * B when `accumulate`.
// Each output element is one fused multiply-add chain in increasing k, so
// a row's result does not depend on the other rows in the batch.
template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
          std::size_t ldb, T* C, std::size_t ldc, bool accumulate);

template <typename T>
Var<T> matmul(Graph<T>& g, const Var<T>& a, const Var<T>& b);
// a (M x K) times b^T where b is (N x K).
template <typename T>
Var<T> matmul_bt(Graph<T>& g, const Var<T>& a, const Var<T>& b);
// x W + bias, with W stored (in x out).
template <typename T>
Var<T> linear(Graph<T>& g, const Var<T>& x, const Var<T>& w, const Var<T>& bias);

template <typename T>
Var<T> add(Graph<T>& g, const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> add_bias(Graph<T>& g, const Var<T>& x, const Var<T>& bias);
template <typename T>
Var<T> mul(Graph<T>& g, const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(Graph<T>& g, const Var<T>& a, T s);
template <typename T>
Var<T> sum(Graph<T>& g, const Var<T>& a);

template <typename T>
Var<T> relu(Graph<T>& g, const Var<T>& x);
template <typename T>
Var<T> sigmoid(Graph<T>& g, const Var<T>& x);
template <typename T>
Var<T> tanh(Graph<T>& g, const Var<T>& x);

template <typename T>
Var<T> embedding(Graph<T>& g, const Var<T>& table, std::span<const std::int32_t> ids);
template <typename T>
Var<T> softmax(Graph<T>& g, const Var<T>& x);
template <typename T>
Var<T> log_softmax(Graph<T>& g, const Var<T>& x);
template <typename T>
Var<T> layer_norm(Graph<T>& g, const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-12));
// Inverted dropout; identity when p == 0.
template <typename T>
Var<T> dropout(Graph<T>& g, const Var<T>& x, double p, Rng& rng);

template <typename T>
Var<T> concat_cols(Graph<T>& g, const std::vector<Var<T>>& parts);
template <typename T>
Var<T> slice_cols(Graph<T>& g, const Var<T>& x, std::size_t begin, std::size_t end);
template <typename T>
Var<T> concat_rows(Graph<T>& g, const std::vector<Var<T>>& parts);
template <typename T>
Var<T> gather_rows(Graph<T>& g, const Var<T>& x, std::span<const std::size_t> rows);
// out[r] = keep[r] ? a[r] : b[r]
template <typename T>
Var<T> select_rows(Graph<T>& g, const Var<T>& a, const Var<T>& b, std::span<const std::uint8_t> keep);

// One attention problem: queries [q_begin, q_begin + q_len) attend keys
// [k_begin, k_begin + k_len). With causal_offset >= 0, query i sees keys
// j <= i + causal_offset.
struct AttnSegment {
  std::size_t q_begin = 0;
  std::size_t q_len = 0;
  std::size_t k_begin = 0;
  std::size_t k_len = 0;
  std::ptrdiff_t causal_offset = -1;
};

// Scaled dot-product attention over `heads` heads of q, k, v (rows x d).
// If `weights` is given it receives, per segment and head, the q_len x k_len
// probability matrix (masked entries zero).
template <typename T>
Var<T> attention(Graph<T>& g, const Var<T>& q, const Var<T>& k, const Var<T>& v, std::size_t heads,
                 std::span<const AttnSegment> segments, std::vector<T>* weights = nullptr);

// Additive attention for a batch of B decoder states. `query` is B x A
// (projected state), `keys` is R x A (projected encoder states), `score` is
// A, `values` is R x D. Row b attends key rows begin[b] .. begin[b] + len[b] - 1.
// Returns contexts B x D; `weights` receives, per row, len[b] probabilities
// (concatenated).
template <typename T>
Var<T> additive_attention(Graph<T>& g, const Var<T>& query, const Var<T>& keys, const Var<T>& score,
                          const Var<T>& values, std::span<const std::size_t> begin,
                          std::span<const std::size_t> len, std::vector<T>* weights = nullptr);

// Fused LSTM cell. `gates` is B x 4H pre-activations ordered (i, f, g, o).
// Returns {h, c}.
template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Graph<T>& g, const Var<T>& gates, const Var<T>& c_prev);

// Mean label-smoothed cross-entropy over rows whose target is not
// `ignore`: the target distribution puts 1 - eps on the gold id and
// eps / (V - 1) on every other id.
template <typename T>
Var<T> cross_entropy(Graph<T>& g, const Var<T>& logits, std::span<const std::int32_t> targets, T eps,
                     std::int32_t ignore);

}  // namespace translit::ag
