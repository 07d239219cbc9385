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

#include "autograd/optim.hpp"

#include <cmath>

namespace translit::ag {

template <typename T>
AdamW<T>::AdamW(const std::vector<Var<T>>& params, AdamWConfig config) : params_(params), config_(config) {
  for (const auto& p : params_) {
    m_.emplace_back(p->size(), T(0));
    v_.emplace_back(p->size(), T(0));
  }
}

template <typename T>
void AdamW<T>::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const T decay = static_cast<T>(1.0 - config_.lr * config_.weight_decay);
  const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
  const T step = static_cast<T>(config_.lr / bc1);
  const T rbc2 = static_cast<T>(1.0 / std::sqrt(bc2));
  const T eps = static_cast<T>(config_.eps);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k]->value;
    const T* g = params_[k]->g();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] *= decay;
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      p[i] -= step * m[i] / (std::sqrt(v[i]) * rbc2 + eps);
    }
  }
}

template <typename T>
double global_grad_norm(const std::vector<Var<T>>& params) {
  double ss = 0;
  for (const auto& p : params) {
    const T* g = p->g();
    for (std::size_t i = 0; i < p->size(); ++i) ss += static_cast<double>(g[i]) * static_cast<double>(g[i]);
  }
  return std::sqrt(ss);
}

template <typename T>
double clip_global_norm(const std::vector<Var<T>>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0) {
    const T s = static_cast<T>(max_norm / norm);
    for (const auto& p : params) {
      T* g = p->g();
      for (std::size_t i = 0; i < p->size(); ++i) g[i] *= s;
    }
  }
  return norm;
}

template class AdamW<float>;
template class AdamW<double>;
template double global_grad_norm<float>(const std::vector<Var<float>>&);
template double global_grad_norm<double>(const std::vector<Var<double>>&);
template double clip_global_norm<float>(const std::vector<Var<float>>&, double);
template double clip_global_norm<double>(const std::vector<Var<double>>&, double);

}  // namespace translit::ag
