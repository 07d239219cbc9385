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
#include <vector>

#include "autograd/tensor.hpp"

namespace translit::ag {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Decoupled weight decay followed by the bias-corrected Adam update.
template <typename T>
class AdamW {
 public:
  AdamW(const std::vector<Var<T>>& params, AdamWConfig config);

  void step();
  std::uint64_t steps() const { return t_; }
  const AdamWConfig& config() const { return config_; }

  // Moment buffers in parameter order, for checkpointing.
  std::vector<std::vector<T>>& first_moments() { return m_; }
  std::vector<std::vector<T>>& second_moments() { return v_; }
  void set_steps(std::uint64_t t) { t_ = t; }

 private:
  std::vector<Var<T>> params_;
  AdamWConfig config_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::uint64_t t_ = 0;
};

// Global L2 norm of all gradients (accumulated in double).
template <typename T>
double global_grad_norm(const std::vector<Var<T>>& params);

// Rescales every gradient by max_norm / norm when the global norm exceeds
// max_norm. Returns the norm before clipping.
template <typename T>
double clip_global_norm(const std::vector<Var<T>>& params, double max_norm);

}  // namespace translit::ag
