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

#include "autograd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define TL_HAVE_AVX2 1
#endif

namespace translit::ag {

std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorKind::kInvalidArgument, std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

template <typename T>
void require_2d(const char* op, const Var<T>& x) {
  if (x->shape.size() != 2) fail(ErrorKind::kInvalidArgument, std::string(op) + ": expected a matrix, got " + shape_str(x->shape));
}

template <typename T>
std::vector<T> transpose(const T* src, std::size_t rows, std::size_t cols) {
  std::vector<T> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = src[r * cols + c];
  return out;
}

template <typename T>
void gemm_generic(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
                  std::size_t ldb, T* C, std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < M; ++i) {
    T* c = C + i * ldc;
    if (!accumulate) std::fill(c, c + N, T(0));
    for (std::size_t k = 0; k < K; ++k) {
      const T a = A[i * lda + k];
      const T* b = B + k * ldb;
      for (std::size_t j = 0; j < N; ++j) c[j] = std::fma(a, b[j], c[j]);
    }
  }
}

#ifdef TL_HAVE_AVX2
template <int R>
inline void kernel16(std::size_t K, const float* A, std::size_t lda, const float* B, std::size_t ldb, float* C,
                     std::size_t ldc, bool accumulate) {
  __m256 c0[R], c1[R];
  for (int r = 0; r < R; ++r) {
    c0[r] = accumulate ? _mm256_loadu_ps(C + r * ldc) : _mm256_setzero_ps();
    c1[r] = accumulate ? _mm256_loadu_ps(C + r * ldc + 8) : _mm256_setzero_ps();
  }
  for (std::size_t k = 0; k < K; ++k) {
    const __m256 b0 = _mm256_loadu_ps(B + k * ldb);
    const __m256 b1 = _mm256_loadu_ps(B + k * ldb + 8);
    for (int r = 0; r < R; ++r) {
      const __m256 a = _mm256_broadcast_ss(A + r * lda + k);
      c0[r] = _mm256_fmadd_ps(a, b0, c0[r]);
      c1[r] = _mm256_fmadd_ps(a, b1, c1[r]);
    }
  }
  for (int r = 0; r < R; ++r) {
    _mm256_storeu_ps(C + r * ldc, c0[r]);
    _mm256_storeu_ps(C + r * ldc + 8, c1[r]);
  }
}

template <int R>
inline void kernel8(std::size_t K, const float* A, std::size_t lda, const float* B, std::size_t ldb, float* C,
                    std::size_t ldc, bool accumulate) {
  __m256 c0[R];
  for (int r = 0; r < R; ++r) c0[r] = accumulate ? _mm256_loadu_ps(C + r * ldc) : _mm256_setzero_ps();
  for (std::size_t k = 0; k < K; ++k) {
    const __m256 b0 = _mm256_loadu_ps(B + k * ldb);
    for (int r = 0; r < R; ++r) c0[r] = _mm256_fmadd_ps(_mm256_broadcast_ss(A + r * lda + k), b0, c0[r]);
  }
  for (int r = 0; r < R; ++r) _mm256_storeu_ps(C + r * ldc, c0[r]);
}

template <int R>
void block(std::size_t N, std::size_t K, const float* A, std::size_t lda, const float* B, std::size_t ldb,
           float* C, std::size_t ldc, bool accumulate, std::size_t j) {
  if (j + 16 <= N) {
    kernel16<R>(K, A, lda, B + j, ldb, C + j, ldc, accumulate);
  } else if (j + 8 <= N) {
    kernel8<R>(K, A, lda, B + j, ldb, C + j, ldc, accumulate);
  } else {
    for (int r = 0; r < R; ++r) {
      for (std::size_t jj = j; jj < N; ++jj) {
        float acc = accumulate ? C[r * ldc + jj] : 0.0f;
        for (std::size_t k = 0; k < K; ++k) acc = std::fma(A[r * lda + k], B[k * ldb + jj], acc);
        C[r * ldc + jj] = acc;
      }
    }
  }
}

void gemm_f32(std::size_t M, std::size_t N, std::size_t K, const float* A, std::size_t lda, const float* B,
              std::size_t ldb, float* C, std::size_t ldc, bool accumulate) {
  for (std::size_t j = 0; j < N;) {
    const std::size_t step = j + 16 <= N ? 16 : (j + 8 <= N ? 8 : N - j);
    std::size_t i = 0;
    for (; i + 4 <= M; i += 4) block<4>(N, K, A + i * lda, lda, B, ldb, C + i * ldc, ldc, accumulate, j);
    switch (M - i) {
      case 3: block<3>(N, K, A + i * lda, lda, B, ldb, C + i * ldc, ldc, accumulate, j); break;
      case 2: block<2>(N, K, A + i * lda, lda, B, ldb, C + i * ldc, ldc, accumulate, j); break;
      case 1: block<1>(N, K, A + i * lda, lda, B, ldb, C + i * ldc, ldc, accumulate, j); break;
      default: break;
    }
    j += step;
  }
}
#endif

template <typename T>
Var<T> like(const Var<T>& x, bool requires_grad) {
  return make_tensor<T>(x->shape, requires_grad);
}

template <typename T>
bool any_wants(const Graph<T>& g, std::initializer_list<const Var<T>*> xs) {
  for (const Var<T>* x : xs)
    if (g.wants(*x)) return true;
  return false;
}

}  // namespace

template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B, std::size_t ldb,
          T* C, std::size_t ldc, bool accumulate) {
#ifdef TL_HAVE_AVX2
  if constexpr (std::is_same_v<T, float>) {
    gemm_f32(M, N, K, A, lda, B, ldb, C, ldc, accumulate);
    return;
  }
#endif
  gemm_generic(M, N, K, A, lda, B, ldb, C, ldc, accumulate);
}

template <typename T>
Var<T> matmul(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
  require_2d("matmul", a);
  require_2d("matmul", b);
  if (a->shape[1] != b->shape[0]) shape_error("matmul", a->shape, b->shape);
  const std::size_t M = a->shape[0], K = a->shape[1], N = b->shape[1];
  const bool w = any_wants(g, {&a, &b});
  auto out = make_tensor<T>({M, N}, w);
  gemm(M, N, K, a->value.data(), K, b->value.data(), N, out->value.data(), N, false);
  if (w) {
    g.push([a, b, out, M, N, K, &g] {
      const T* dc = out->g();
      if (g.wants(a)) {
        const auto bt = transpose(b->value.data(), K, N);
        gemm(M, K, N, dc, N, bt.data(), K, a->g(), K, true);
      }
      if (g.wants(b)) {
        const auto at = transpose(a->value.data(), M, K);
        gemm(K, N, M, at.data(), M, dc, N, b->g(), N, true);
      }
    });
  }
  return out;
}

template <typename T>
Var<T> matmul_bt(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
  require_2d("matmul_bt", a);
  require_2d("matmul_bt", b);
  if (a->shape[1] != b->shape[1]) shape_error("matmul_bt", a->shape, b->shape);
  const std::size_t M = a->shape[0], K = a->shape[1], N = b->shape[0];
  const bool w = any_wants(g, {&a, &b});
  auto out = make_tensor<T>({M, N}, w);
  const auto bt = transpose(b->value.data(), N, K);
  gemm(M, N, K, a->value.data(), K, bt.data(), N, out->value.data(), N, false);
  if (w) {
    g.push([a, b, out, M, N, K, &g] {
      const T* dc = out->g();
      if (g.wants(a)) gemm(M, K, N, dc, N, b->value.data(), K, a->g(), K, true);
      if (g.wants(b)) {
        const auto dct = transpose(dc, M, N);
        gemm(N, K, M, dct.data(), M, a->value.data(), K, b->g(), K, true);
      }
    });
  }
  return out;
}

template <typename T>
Var<T> linear(Graph<T>& g, const Var<T>& x, const Var<T>& wt, const Var<T>& bias) {
  require_2d("linear", x);
  require_2d("linear", wt);
  if (x->shape[1] != wt->shape[0] || bias->size() != wt->shape[1]) shape_error("linear", x->shape, wt->shape);
  const std::size_t M = x->shape[0], K = x->shape[1], N = wt->shape[1];
  const bool w = any_wants(g, {&x, &wt, &bias});
  auto out = make_tensor<T>({M, N}, w);
  T* o = out->value.data();
  for (std::size_t i = 0; i < M; ++i) std::copy(bias->value.begin(), bias->value.end(), o + i * N);
  gemm(M, N, K, x->value.data(), K, wt->value.data(), N, o, N, true);
  if (w) {
    g.push([x, wt, bias, out, M, N, K, &g] {
      const T* dc = out->g();
      if (g.wants(x)) {
        const auto bt = transpose(wt->value.data(), K, N);
        gemm(M, K, N, dc, N, bt.data(), K, x->g(), K, true);
      }
      if (g.wants(wt)) {
        const auto at = transpose(x->value.data(), M, K);
        gemm(K, N, M, at.data(), M, dc, N, wt->g(), N, true);
      }
      if (g.wants(bias)) {
        T* db = bias->g();
        for (std::size_t i = 0; i < M; ++i)
          for (std::size_t j = 0; j < N; ++j) db[j] += dc[i * N + j];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> add(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
  if (a->shape != b->shape) shape_error("add", a->shape, b->shape);
  const bool w = any_wants(g, {&a, &b});
  auto out = like(a, w);
  for (std::size_t i = 0; i < a->size(); ++i) out->value[i] = a->value[i] + b->value[i];
  if (w) {
    g.push([a, b, out, &g] {
      const T* d = out->g();
      if (g.wants(a)) {
        T* da = a->g();
        for (std::size_t i = 0; i < out->size(); ++i) da[i] += d[i];
      }
      if (g.wants(b)) {
        T* db = b->g();
        for (std::size_t i = 0; i < out->size(); ++i) db[i] += d[i];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> add_bias(Graph<T>& g, const Var<T>& x, const Var<T>& bias) {
  const std::size_t N = x->cols(), M = x->rows();
  if (bias->size() != N) shape_error("add_bias", x->shape, bias->shape);
  const bool w = any_wants(g, {&x, &bias});
  auto out = like(x, w);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < N; ++j) out->value[i * N + j] = x->value[i * N + j] + bias->value[j];
  if (w) {
    g.push([x, bias, out, M, N, &g] {
      const T* d = out->g();
      if (g.wants(x)) {
        T* dx = x->g();
        for (std::size_t i = 0; i < M * N; ++i) dx[i] += d[i];
      }
      if (g.wants(bias)) {
        T* db = bias->g();
        for (std::size_t i = 0; i < M; ++i)
          for (std::size_t j = 0; j < N; ++j) db[j] += d[i * N + j];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> mul(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
  if (a->shape != b->shape) shape_error("mul", a->shape, b->shape);
  const bool w = any_wants(g, {&a, &b});
  auto out = like(a, w);
  for (std::size_t i = 0; i < a->size(); ++i) out->value[i] = a->value[i] * b->value[i];
  if (w) {
    g.push([a, b, out, &g] {
      const T* d = out->g();
      if (g.wants(a)) {
        T* da = a->g();
        for (std::size_t i = 0; i < out->size(); ++i) da[i] += d[i] * b->value[i];
      }
      if (g.wants(b)) {
        T* db = b->g();
        for (std::size_t i = 0; i < out->size(); ++i) db[i] += d[i] * a->value[i];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> scale(Graph<T>& g, const Var<T>& a, T s) {
  const bool w = g.wants(a);
  auto out = like(a, w);
  for (std::size_t i = 0; i < a->size(); ++i) out->value[i] = a->value[i] * s;
  if (w) {
    g.push([a, out, s] {
      const T* d = out->g();
      T* da = a->g();
      for (std::size_t i = 0; i < out->size(); ++i) da[i] += d[i] * s;
    });
  }
  return out;
}

template <typename T>
Var<T> sum(Graph<T>& g, const Var<T>& a) {
  const bool w = g.wants(a);
  auto out = make_tensor<T>({1}, w);
  T acc = 0;
  for (T v : a->value) acc += v;
  out->value[0] = acc;
  if (w) {
    g.push([a, out] {
      const T d = out->g()[0];
      T* da = a->g();
      for (std::size_t i = 0; i < a->size(); ++i) da[i] += d;
    });
  }
  return out;
}

namespace {

template <typename T, typename F, typename D>
Var<T> unary(Graph<T>& g, const Var<T>& x, F f, D dfdy) {
  const bool w = g.wants(x);
  auto out = like(x, w);
  for (std::size_t i = 0; i < x->size(); ++i) out->value[i] = f(x->value[i]);
  if (w) {
    g.push([x, out, dfdy] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < out->size(); ++i) dx[i] += d[i] * dfdy(x->value[i], out->value[i]);
    });
  }
  return out;
}

template <typename T>
T sigmoid_value(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
Var<T> relu(Graph<T>& g, const Var<T>& x) {
  return unary(g, x, [](T v) { return v > 0 ? v : T(0); }, [](T v, T) { return v > 0 ? T(1) : T(0); });
}

template <typename T>
Var<T> sigmoid(Graph<T>& g, const Var<T>& x) {
  return unary(g, x, [](T v) { return sigmoid_value(v); }, [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> tanh(Graph<T>& g, const Var<T>& x) {
  return unary(g, x, [](T v) { return std::tanh(v); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> embedding(Graph<T>& g, const Var<T>& table, std::span<const std::int32_t> ids) {
  require_2d("embedding", table);
  const std::size_t V = table->shape[0], D = table->shape[1];
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= V) {
      fail(ErrorKind::kInvalidArgument, "embedding: id " + std::to_string(id) + " outside table of " + std::to_string(V));
    }
  }
  const bool w = g.wants(table);
  auto out = make_tensor<T>({ids.size(), D}, w);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::copy_n(table->value.data() + static_cast<std::size_t>(ids[r]) * D, D, out->value.data() + r * D);
  }
  if (w) {
    g.push([table, out, idv = std::vector<std::int32_t>(ids.begin(), ids.end()), D] {
      const T* d = out->g();
      T* dt = table->g();
      for (std::size_t r = 0; r < idv.size(); ++r) {
        T* row = dt + static_cast<std::size_t>(idv[r]) * D;
        for (std::size_t j = 0; j < D; ++j) row[j] += d[r * D + j];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> softmax(Graph<T>& g, const Var<T>& x) {
  const std::size_t N = x->cols(), M = x->rows();
  const bool w = g.wants(x);
  auto out = like(x, w);
  for (std::size_t i = 0; i < M; ++i) {
    const T* xi = x->value.data() + i * N;
    T* yi = out->value.data() + i * N;
    const T mx = *std::max_element(xi, xi + N);
    T s = 0;
    for (std::size_t j = 0; j < N; ++j) s += (yi[j] = std::exp(xi[j] - mx));
    for (std::size_t j = 0; j < N; ++j) yi[j] /= s;
  }
  if (w) {
    g.push([x, out, M, N] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < M; ++i) {
        const T* yi = out->value.data() + i * N;
        const T* di = d + i * N;
        T dot = 0;
        for (std::size_t j = 0; j < N; ++j) dot += yi[j] * di[j];
        for (std::size_t j = 0; j < N; ++j) dx[i * N + j] += yi[j] * (di[j] - dot);
      }
    });
  }
  return out;
}

template <typename T>
Var<T> log_softmax(Graph<T>& g, const Var<T>& x) {
  const std::size_t N = x->cols(), M = x->rows();
  const bool w = g.wants(x);
  auto out = like(x, w);
  for (std::size_t i = 0; i < M; ++i) {
    const T* xi = x->value.data() + i * N;
    T* yi = out->value.data() + i * N;
    const T mx = *std::max_element(xi, xi + N);
    T s = 0;
    for (std::size_t j = 0; j < N; ++j) s += std::exp(xi[j] - mx);
    const T lse = mx + std::log(s);
    for (std::size_t j = 0; j < N; ++j) yi[j] = xi[j] - lse;
  }
  if (w) {
    g.push([x, out, M, N] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < M; ++i) {
        const T* yi = out->value.data() + i * N;
        T s = 0;
        for (std::size_t j = 0; j < N; ++j) s += d[i * N + j];
        for (std::size_t j = 0; j < N; ++j) dx[i * N + j] += d[i * N + j] - std::exp(yi[j]) * s;
      }
    });
  }
  return out;
}

template <typename T>
Var<T> layer_norm(Graph<T>& g, const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps) {
  const std::size_t N = x->cols(), M = x->rows();
  if (gamma->size() != N || beta->size() != N) shape_error("layer_norm", x->shape, gamma->shape);
  const bool w = any_wants(g, {&x, &gamma, &beta});
  auto out = like(x, w);
  std::vector<T> xhat(M * N), rstd(M);
  for (std::size_t i = 0; i < M; ++i) {
    const T* xi = x->value.data() + i * N;
    T mean = 0;
    for (std::size_t j = 0; j < N; ++j) mean += xi[j];
    mean /= static_cast<T>(N);
    T var = 0;
    for (std::size_t j = 0; j < N; ++j) var += (xi[j] - mean) * (xi[j] - mean);
    var /= static_cast<T>(N);
    rstd[i] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < N; ++j) {
      const T h = (xi[j] - mean) * rstd[i];
      xhat[i * N + j] = h;
      out->value[i * N + j] = h * gamma->value[j] + beta->value[j];
    }
  }
  if (w) {
    g.push([x, gamma, beta, out, xhat = std::move(xhat), rstd = std::move(rstd), M, N, &g] {
      const T* d = out->g();
      if (g.wants(gamma) || g.wants(beta)) {
        T* dg = gamma->g();
        T* db = beta->g();
        for (std::size_t i = 0; i < M; ++i)
          for (std::size_t j = 0; j < N; ++j) {
            dg[j] += d[i * N + j] * xhat[i * N + j];
            db[j] += d[i * N + j];
          }
      }
      if (g.wants(x)) {
        T* dx = x->g();
        for (std::size_t i = 0; i < M; ++i) {
          T m1 = 0, m2 = 0;
          for (std::size_t j = 0; j < N; ++j) {
            const T dh = d[i * N + j] * gamma->value[j];
            m1 += dh;
            m2 += dh * xhat[i * N + j];
          }
          m1 /= static_cast<T>(N);
          m2 /= static_cast<T>(N);
          for (std::size_t j = 0; j < N; ++j) {
            const T dh = d[i * N + j] * gamma->value[j];
            dx[i * N + j] += rstd[i] * (dh - m1 - xhat[i * N + j] * m2);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Var<T> dropout(Graph<T>& g, const Var<T>& x, double p, Rng& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) fail(ErrorKind::kInvalidArgument, "dropout probability must be below 1");
  const bool w = g.wants(x);
  auto out = like(x, w);
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> mask(x->size());
  for (std::size_t i = 0; i < x->size(); ++i) {
    mask[i] = rng.uniform() < p ? T(0) : keep;
    out->value[i] = x->value[i] * mask[i];
  }
  if (w) {
    g.push([x, out, mask = std::move(mask)] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < out->size(); ++i) dx[i] += d[i] * mask[i];
    });
  }
  return out;
}

template <typename T>
Var<T> concat_cols(Graph<T>& g, const std::vector<Var<T>>& parts) {
  if (parts.empty()) fail(ErrorKind::kInvalidArgument, "concat_cols: no inputs");
  const std::size_t M = parts[0]->rows();
  std::size_t N = 0;
  bool w = false;
  for (const auto& p : parts) {
    if (p->rows() != M) shape_error("concat_cols", parts[0]->shape, p->shape);
    N += p->cols();
    w = w || g.wants(p);
  }
  auto out = make_tensor<T>({M, N}, w);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t n = p->cols();
    for (std::size_t i = 0; i < M; ++i) std::copy_n(p->value.data() + i * n, n, out->value.data() + i * N + off);
    off += n;
  }
  if (w) {
    g.push([parts, out, M, N, &g] {
      const T* d = out->g();
      std::size_t off = 0;
      for (const auto& p : parts) {
        const std::size_t n = p->cols();
        if (g.wants(p)) {
          T* dp = p->g();
          for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < n; ++j) dp[i * n + j] += d[i * N + off + j];
        }
        off += n;
      }
    });
  }
  return out;
}

template <typename T>
Var<T> slice_cols(Graph<T>& g, const Var<T>& x, std::size_t begin, std::size_t end) {
  const std::size_t N = x->cols(), M = x->rows();
  if (begin > end || end > N) fail(ErrorKind::kInvalidArgument, "slice_cols: range outside " + shape_str(x->shape));
  const std::size_t n = end - begin;
  const bool w = g.wants(x);
  auto out = make_tensor<T>({M, n}, w);
  for (std::size_t i = 0; i < M; ++i) std::copy_n(x->value.data() + i * N + begin, n, out->value.data() + i * n);
  if (w) {
    g.push([x, out, M, N, n, begin] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < n; ++j) dx[i * N + begin + j] += d[i * n + j];
    });
  }
  return out;
}

template <typename T>
Var<T> concat_rows(Graph<T>& g, const std::vector<Var<T>>& parts) {
  if (parts.empty()) fail(ErrorKind::kInvalidArgument, "concat_rows: no inputs");
  const std::size_t N = parts[0]->cols();
  std::size_t M = 0;
  bool w = false;
  for (const auto& p : parts) {
    if (p->cols() != N) shape_error("concat_rows", parts[0]->shape, p->shape);
    M += p->rows();
    w = w || g.wants(p);
  }
  auto out = make_tensor<T>({M, N}, w);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p->value.begin(), p->value.end(), out->value.begin() + static_cast<std::ptrdiff_t>(off));
    off += p->size();
  }
  if (w) {
    g.push([parts, out, &g] {
      const T* d = out->g();
      std::size_t off = 0;
      for (const auto& p : parts) {
        if (g.wants(p)) {
          T* dp = p->g();
          for (std::size_t i = 0; i < p->size(); ++i) dp[i] += d[off + i];
        }
        off += p->size();
      }
    });
  }
  return out;
}

template <typename T>
Var<T> gather_rows(Graph<T>& g, const Var<T>& x, std::span<const std::size_t> rows) {
  const std::size_t N = x->cols(), M = x->rows();
  for (auto r : rows)
    if (r >= M) fail(ErrorKind::kInvalidArgument, "gather_rows: row " + std::to_string(r) + " outside " + shape_str(x->shape));
  const bool w = g.wants(x);
  auto out = make_tensor<T>({rows.size(), N}, w);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(x->value.data() + rows[i] * N, N, out->value.data() + i * N);
  if (w) {
    g.push([x, out, rv = std::vector<std::size_t>(rows.begin(), rows.end()), N] {
      const T* d = out->g();
      T* dx = x->g();
      for (std::size_t i = 0; i < rv.size(); ++i)
        for (std::size_t j = 0; j < N; ++j) dx[rv[i] * N + j] += d[i * N + j];
    });
  }
  return out;
}

template <typename T>
Var<T> select_rows(Graph<T>& g, const Var<T>& a, const Var<T>& b, std::span<const std::uint8_t> keep) {
  if (a->shape != b->shape) shape_error("select_rows", a->shape, b->shape);
  const std::size_t N = a->cols(), M = a->rows();
  if (keep.size() != M) fail(ErrorKind::kInvalidArgument, "select_rows: mask length mismatch");
  const bool w = any_wants(g, {&a, &b});
  auto out = like(a, w);
  for (std::size_t i = 0; i < M; ++i)
    std::copy_n((keep[i] ? a : b)->value.data() + i * N, N, out->value.data() + i * N);
  if (w) {
    g.push([a, b, out, kv = std::vector<std::uint8_t>(keep.begin(), keep.end()), M, N, &g] {
      const T* d = out->g();
      for (std::size_t i = 0; i < M; ++i) {
        const Var<T>& src = kv[i] ? a : b;
        if (!g.wants(src)) continue;
        T* ds = src->g();
        for (std::size_t j = 0; j < N; ++j) ds[i * N + j] += d[i * N + j];
      }
    });
  }
  return out;
}

template <typename T>
Var<T> attention(Graph<T>& g, const Var<T>& q, const Var<T>& k, const Var<T>& v, std::size_t heads,
                 std::span<const AttnSegment> segments, std::vector<T>* weights) {
  const std::size_t d = q->cols();
  if (k->cols() != d || v->cols() != d || k->rows() != v->rows()) shape_error("attention", q->shape, k->shape);
  if (heads == 0 || d % heads != 0) fail(ErrorKind::kInvalidArgument, "attention: model width not divisible by heads");
  const std::size_t dh = d / heads;
  const T sc = T(1) / std::sqrt(static_cast<T>(dh));
  for (const auto& s : segments) {
    if (s.q_begin + s.q_len > q->rows() || s.k_begin + s.k_len > k->rows()) {
      fail(ErrorKind::kInvalidArgument, "attention: segment outside inputs");
    }
  }
  const bool w = any_wants(g, {&q, &k, &v});
  auto out = make_tensor<T>({q->rows(), d}, w);
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& s : segments) {
    offsets.push_back(total);
    total += heads * s.q_len * s.k_len;
  }
  std::vector<T> probs(total, T(0));
  const T* Q = q->value.data();
  const T* K = k->value.data();
  const T* Vv = v->value.data();
  T* O = out->value.data();
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto& s = segments[si];
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < s.q_len; ++i) {
        const std::size_t lim =
            s.causal_offset < 0 ? s.k_len
                                : std::min<std::size_t>(s.k_len, i + static_cast<std::size_t>(s.causal_offset) + 1);
        if (lim == 0) continue;
        T* p = probs.data() + offsets[si] + (h * s.q_len + i) * s.k_len;
        const T* qi = Q + (s.q_begin + i) * d + h * dh;
        T mx = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < lim; ++j) {
          const T* kj = K + (s.k_begin + j) * d + h * dh;
          T acc = 0;
          for (std::size_t c = 0; c < dh; ++c) acc += qi[c] * kj[c];
          p[j] = acc * sc;
          mx = std::max(mx, p[j]);
        }
        T z = 0;
        for (std::size_t j = 0; j < lim; ++j) z += (p[j] = std::exp(p[j] - mx));
        for (std::size_t j = 0; j < lim; ++j) p[j] /= z;
        T* oi = O + (s.q_begin + i) * d + h * dh;
        for (std::size_t j = 0; j < lim; ++j) {
          const T* vj = Vv + (s.k_begin + j) * d + h * dh;
          for (std::size_t c = 0; c < dh; ++c) oi[c] += p[j] * vj[c];
        }
      }
    }
  }
  if (weights) *weights = probs;
  if (w) {
    g.push([q, k, v, out, heads, d, dh, sc, segs = std::vector<AttnSegment>(segments.begin(), segments.end()),
            offsets = std::move(offsets), probs = std::move(probs), &g] {
      const T* dO = out->g();
      T* dQ = g.wants(q) ? q->g() : nullptr;
      T* dK = g.wants(k) ? k->g() : nullptr;
      T* dV = g.wants(v) ? v->g() : nullptr;
      std::vector<T> dp;
      for (std::size_t si = 0; si < segs.size(); ++si) {
        const auto& s = segs[si];
        dp.assign(s.k_len, T(0));
        for (std::size_t h = 0; h < heads; ++h) {
          for (std::size_t i = 0; i < s.q_len; ++i) {
            const std::size_t lim = s.causal_offset < 0
                                        ? s.k_len
                                        : std::min<std::size_t>(s.k_len, i + static_cast<std::size_t>(s.causal_offset) + 1);
            if (lim == 0) continue;
            const T* p = probs.data() + offsets[si] + (h * s.q_len + i) * s.k_len;
            const T* doi = dO + (s.q_begin + i) * d + h * dh;
            T t = 0;
            for (std::size_t j = 0; j < lim; ++j) {
              const T* vj = v->value.data() + (s.k_begin + j) * d + h * dh;
              T acc = 0;
              for (std::size_t c = 0; c < dh; ++c) acc += doi[c] * vj[c];
              dp[j] = acc;
              t += p[j] * acc;
              if (dV) {
                T* dvj = dV + (s.k_begin + j) * d + h * dh;
                for (std::size_t c = 0; c < dh; ++c) dvj[c] += p[j] * doi[c];
              }
            }
            const T* qi = q->value.data() + (s.q_begin + i) * d + h * dh;
            T* dqi = dQ ? dQ + (s.q_begin + i) * d + h * dh : nullptr;
            for (std::size_t j = 0; j < lim; ++j) {
              const T ds = p[j] * (dp[j] - t) * sc;
              if (dqi) {
                const T* kj = k->value.data() + (s.k_begin + j) * d + h * dh;
                for (std::size_t c = 0; c < dh; ++c) dqi[c] += ds * kj[c];
              }
              if (dK) {
                T* dkj = dK + (s.k_begin + j) * d + h * dh;
                for (std::size_t c = 0; c < dh; ++c) dkj[c] += ds * qi[c];
              }
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Var<T> additive_attention(Graph<T>& g, const Var<T>& query, const Var<T>& keys, const Var<T>& score,
                          const Var<T>& values, std::span<const std::size_t> begin,
                          std::span<const std::size_t> len, std::vector<T>* weights) {
  const std::size_t B = query->rows(), A = query->cols(), D = values->cols(), R = keys->rows();
  if (keys->cols() != A || values->rows() != R || score->size() != A || len.size() != B || begin.size() != B) {
    shape_error("additive_attention", query->shape, keys->shape);
  }
  std::vector<std::size_t> off(B + 1, 0);
  for (std::size_t b = 0; b < B; ++b) {
    if (begin[b] + len[b] > R) fail(ErrorKind::kInvalidArgument, "additive_attention: key range outside inputs");
    off[b + 1] = off[b] + len[b];
  }
  const bool w = any_wants(g, {&query, &keys, &score, &values});
  auto out = make_tensor<T>({B, D}, w);
  std::vector<T> hidden(off[B] * A, T(0));
  std::vector<T> alpha(off[B], T(0));
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t n = len[b];
    if (n == 0) continue;
    const T* qb = query->value.data() + b * A;
    T* al = alpha.data() + off[b];
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const T* ki = keys->value.data() + (begin[b] + i) * A;
      T* hi = hidden.data() + (off[b] + i) * A;
      T e = 0;
      for (std::size_t a = 0; a < A; ++a) {
        hi[a] = std::tanh(qb[a] + ki[a]);
        e += score->value[a] * hi[a];
      }
      al[i] = e;
      mx = std::max(mx, e);
    }
    T z = 0;
    for (std::size_t i = 0; i < n; ++i) z += (al[i] = std::exp(al[i] - mx));
    for (std::size_t i = 0; i < n; ++i) al[i] /= z;
    T* ob = out->value.data() + b * D;
    for (std::size_t i = 0; i < n; ++i) {
      const T* vi = values->value.data() + (begin[b] + i) * D;
      for (std::size_t c = 0; c < D; ++c) ob[c] += al[i] * vi[c];
    }
  }
  if (weights) *weights = alpha;
  if (w) {
    g.push([query, keys, score, values, out, B, A, D, bg = std::vector<std::size_t>(begin.begin(), begin.end()),
            off = std::move(off), hidden = std::move(hidden), alpha = std::move(alpha), &g] {
      const T* dO = out->g();
      T* dq = g.wants(query) ? query->g() : nullptr;
      T* dk = g.wants(keys) ? keys->g() : nullptr;
      T* dsc = g.wants(score) ? score->g() : nullptr;
      T* dv = g.wants(values) ? values->g() : nullptr;
      std::vector<T> da, dpre(A);
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t n = off[b + 1] - off[b];
        if (n == 0) continue;
        da.assign(n, T(0));
        const T* al = alpha.data() + off[b];
        const T* dob = dO + b * D;
        T t = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const T* vi = values->value.data() + (bg[b] + i) * D;
          T acc = 0;
          for (std::size_t c = 0; c < D; ++c) acc += dob[c] * vi[c];
          da[i] = acc;
          t += al[i] * acc;
          if (dv) {
            T* dvi = dv + (bg[b] + i) * D;
            for (std::size_t c = 0; c < D; ++c) dvi[c] += al[i] * dob[c];
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          const T de = al[i] * (da[i] - t);
          const T* hi = hidden.data() + (off[b] + i) * A;
          for (std::size_t a = 0; a < A; ++a) {
            if (dsc) dsc[a] += de * hi[a];
            dpre[a] = de * score->value[a] * (T(1) - hi[a] * hi[a]);
          }
          if (dq)
            for (std::size_t a = 0; a < A; ++a) dq[b * A + a] += dpre[a];
          if (dk)
            for (std::size_t a = 0; a < A; ++a) dk[(bg[b] + i) * A + a] += dpre[a];
        }
      }
    });
  }
  return out;
}

template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Graph<T>& g, const Var<T>& gates, const Var<T>& c_prev) {
  const std::size_t B = gates->rows(), H = c_prev->cols();
  if (gates->cols() != 4 * H || c_prev->rows() != B) shape_error("lstm_cell", gates->shape, c_prev->shape);
  const bool w = any_wants(g, {&gates, &c_prev});
  auto h = make_tensor<T>({B, H}, w);
  auto c = make_tensor<T>({B, H}, w);
  // Activated gates (i, f, g, o) and tanh(c), kept for backward.
  std::vector<T> act(B * 4 * H), tc(B * H);
  for (std::size_t b = 0; b < B; ++b) {
    const T* z = gates->value.data() + b * 4 * H;
    T* a = act.data() + b * 4 * H;
    for (std::size_t j = 0; j < H; ++j) {
      a[j] = sigmoid_value(z[j]);
      a[H + j] = sigmoid_value(z[H + j]);
      a[2 * H + j] = std::tanh(z[2 * H + j]);
      a[3 * H + j] = sigmoid_value(z[3 * H + j]);
      const T cv = a[H + j] * c_prev->value[b * H + j] + a[j] * a[2 * H + j];
      c->value[b * H + j] = cv;
      tc[b * H + j] = std::tanh(cv);
      h->value[b * H + j] = a[3 * H + j] * tc[b * H + j];
    }
  }
  if (w) {
    g.push([gates, c_prev, h, c, act = std::move(act), tc = std::move(tc), B, H, &g] {
      const T* dh = h->g();
      const T* dc_in = c->g();
      T* dz = g.wants(gates) ? gates->g() : nullptr;
      T* dcp = g.wants(c_prev) ? c_prev->g() : nullptr;
      for (std::size_t b = 0; b < B; ++b) {
        const T* a = act.data() + b * 4 * H;
        for (std::size_t j = 0; j < H; ++j) {
          const std::size_t r = b * H + j;
          const T ig = a[j], fg = a[H + j], gg = a[2 * H + j], og = a[3 * H + j];
          const T dcv = dc_in[r] + dh[r] * og * (T(1) - tc[r] * tc[r]);
          if (dz) {
            T* z = dz + b * 4 * H;
            z[j] += dcv * gg * ig * (T(1) - ig);
            z[H + j] += dcv * c_prev->value[r] * fg * (T(1) - fg);
            z[2 * H + j] += dcv * ig * (T(1) - gg * gg);
            z[3 * H + j] += dh[r] * tc[r] * og * (T(1) - og);
          }
          if (dcp) dcp[r] += dcv * fg;
        }
      }
    });
  }
  return {h, c};
}

template <typename T>
Var<T> cross_entropy(Graph<T>& g, const Var<T>& logits, std::span<const std::int32_t> targets, T eps,
                     std::int32_t ignore) {
  const std::size_t V = logits->cols(), N = logits->rows();
  if (targets.size() != N) fail(ErrorKind::kInvalidArgument, "cross_entropy: target count does not match logits rows");
  if (V < 2) fail(ErrorKind::kInvalidArgument, "cross_entropy: need at least two classes");
  std::size_t count = 0;
  for (auto t : targets) {
    if (t == ignore) continue;
    if (t < 0 || static_cast<std::size_t>(t) >= V) fail(ErrorKind::kInvalidArgument, "cross_entropy: target id out of range");
    ++count;
  }
  if (count == 0) fail(ErrorKind::kInvalidArgument, "cross_entropy: every position is padding");
  const bool w = g.wants(logits);
  auto out = make_tensor<T>({1}, w);
  const T off = eps / static_cast<T>(V - 1);
  const T on = T(1) - eps;
  std::vector<T> probs(N * V, T(0));
  T total = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (targets[i] == ignore) continue;
    const T* x = logits->value.data() + i * V;
    const T mx = *std::max_element(x, x + V);
    T z = 0;
    for (std::size_t j = 0; j < V; ++j) z += std::exp(x[j] - mx);
    const T lse = mx + std::log(z);
    T row = 0;
    T* p = probs.data() + i * V;
    for (std::size_t j = 0; j < V; ++j) {
      const T lp = x[j] - lse;
      p[j] = std::exp(lp);
      row -= (static_cast<std::size_t>(targets[i]) == j ? on : off) * lp;
    }
    total += row;
  }
  out->value[0] = total / static_cast<T>(count);
  if (w) {
    g.push([logits, out, probs = std::move(probs), tv = std::vector<std::int32_t>(targets.begin(), targets.end()),
            N, V, on, off, ignore, count] {
      const T d = out->g()[0] / static_cast<T>(count);
      T* dx = logits->g();
      for (std::size_t i = 0; i < N; ++i) {
        if (tv[i] == ignore) continue;
        for (std::size_t j = 0; j < V; ++j) {
          const T q = static_cast<std::size_t>(tv[i]) == j ? on : off;
          dx[i * V + j] += d * (probs[i * V + j] - q);
        }
      }
    });
  }
  return out;
}

template <typename T>
Var<T> ParamStore<T>::add(const std::string& name, Shape shape) {
  if (has(name)) fail(ErrorKind::kInternal, "duplicate parameter " + name);
  auto p = make_tensor<T>(std::move(shape), true, name);
  index_[name] = params_.size();
  params_.push_back(p);
  return p;
}

template <typename T>
void ParamStore<T>::alias(const std::string& name, const std::string& target) {
  if (!index_.count(target)) fail(ErrorKind::kInternal, "alias target " + target + " missing");
  aliases_[name] = target;
}

template <typename T>
const Var<T>& ParamStore<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    auto a = aliases_.find(name);
    if (a == aliases_.end()) fail(ErrorKind::kNotFound, "no parameter named " + name);
    it = index_.find(a->second);
  }
  return params_[it->second];
}

template <typename T>
std::size_t ParamStore<T>::count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

#define TL_INSTANTIATE(T)                                                                                          \
  template void gemm<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t, const T*, std::size_t, T*,  \
                        std::size_t, bool);                                                                        \
  template Var<T> matmul<T>(Graph<T>&, const Var<T>&, const Var<T>&);                                              \
  template Var<T> matmul_bt<T>(Graph<T>&, const Var<T>&, const Var<T>&);                                           \
  template Var<T> linear<T>(Graph<T>&, const Var<T>&, const Var<T>&, const Var<T>&);                               \
  template Var<T> add<T>(Graph<T>&, const Var<T>&, const Var<T>&);                                                 \
  template Var<T> add_bias<T>(Graph<T>&, const Var<T>&, const Var<T>&);                                            \
  template Var<T> mul<T>(Graph<T>&, const Var<T>&, const Var<T>&);                                                 \
  template Var<T> scale<T>(Graph<T>&, const Var<T>&, T);                                                           \
  template Var<T> sum<T>(Graph<T>&, const Var<T>&);                                                                \
  template Var<T> relu<T>(Graph<T>&, const Var<T>&);                                                               \
  template Var<T> sigmoid<T>(Graph<T>&, const Var<T>&);                                                            \
  template Var<T> tanh<T>(Graph<T>&, const Var<T>&);                                                               \
  template Var<T> embedding<T>(Graph<T>&, const Var<T>&, std::span<const std::int32_t>);                           \
  template Var<T> softmax<T>(Graph<T>&, const Var<T>&);                                                            \
  template Var<T> log_softmax<T>(Graph<T>&, const Var<T>&);                                                        \
  template Var<T> layer_norm<T>(Graph<T>&, const Var<T>&, const Var<T>&, const Var<T>&, T);                        \
  template Var<T> dropout<T>(Graph<T>&, const Var<T>&, double, Rng&);                                              \
  template Var<T> concat_cols<T>(Graph<T>&, const std::vector<Var<T>>&);                                           \
  template Var<T> slice_cols<T>(Graph<T>&, const Var<T>&, std::size_t, std::size_t);                               \
  template Var<T> concat_rows<T>(Graph<T>&, const std::vector<Var<T>>&);                                           \
  template Var<T> gather_rows<T>(Graph<T>&, const Var<T>&, std::span<const std::size_t>);                          \
  template Var<T> select_rows<T>(Graph<T>&, const Var<T>&, const Var<T>&, std::span<const std::uint8_t>);          \
  template Var<T> attention<T>(Graph<T>&, const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,                \
                               std::span<const AttnSegment>, std::vector<T>*);                                     \
  template Var<T> additive_attention<T>(Graph<T>&, const Var<T>&, const Var<T>&, const Var<T>&, const Var<T>&,     \
                                        std::span<const std::size_t>, std::span<const std::size_t>,                \
                                        std::vector<T>*);                                                          \
  template std::pair<Var<T>, Var<T>> lstm_cell<T>(Graph<T>&, const Var<T>&, const Var<T>&);                        \
  template Var<T> cross_entropy<T>(Graph<T>&, const Var<T>&, std::span<const std::int32_t>, T, std::int32_t);      \
  template class ParamStore<T>;

TL_INSTANTIATE(float)
TL_INSTANTIATE(double)

#undef TL_INSTANTIATE

}  // namespace translit::ag
