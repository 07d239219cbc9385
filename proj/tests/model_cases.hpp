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

#include <memory>
#include <string>

#include "common/rng.hpp"
#include "gradcheck.hpp"
#include "models/model.hpp"
#include "vocab/vocab.hpp"

namespace tltest {

inline translit::models::Json tiny_config(const std::string& arch) {
  using namespace translit::models;
  if (arch == "bilstm") {
    BiLstmConfig c;
    c.embedding_dim = 6;
    c.hidden_size = 5;
    c.decoder_hidden = 7;
    c.attention_dim = 4;
    c.dropout = 0;
    c.max_len = 16;
    return c.to_json();
  }
  TransformerConfig c;
  c.layers = 2;
  c.d_model = 8;
  c.heads = 2;
  c.d_ff = 12;
  c.dropout = 0;
  c.max_len = 16;
  return c.to_json();
}

// Random SOS..EOS framed sequences over the non-special ids of a vocab of size V.
inline translit::models::Batch random_batch(translit::Rng& rng, std::size_t items, std::size_t V,
                                            std::size_t max_chars = 4) {
  using namespace translit;
  models::Batch b;
  auto seq = [&](std::size_t min_len) {
    models::Ids s{vocab::kSos};
    const std::size_t n = min_len + rng.below(max_chars - min_len + 1);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<std::int32_t>(vocab::kNumSpecials + rng.below(V - vocab::kNumSpecials)));
    s.push_back(vocab::kEos);
    return s;
  };
  for (std::size_t i = 0; i < items; ++i) {
    b.src.push_back(seq(1));
    b.tgt.push_back(seq(0));
  }
  return b;
}

// Finite-difference check of the smoothed loss with respect to every
// parameter of a tiny 64-bit model.
inline GradCheck model_grad_check(const std::string& arch, std::uint64_t seed) {
  using namespace translit;
  const std::size_t V = 7;
  auto model = models::make_model<double>(arch, tiny_config(arch), V, V + 1);
  // At small scales the BiLSTM attention gradients sit at round-off level.
  model->init(seed, arch == "bilstm" ? 0.8 : 0.3);
  Rng rng(stream_seed(seed, "gradcheck-batch"));
  const auto batch = random_batch(rng, 3, V);
  return grad_check([&](ag::Graph<double>& g) { return model->loss(g, batch, 0.1, nullptr); },
                    model->params().params());
}

}  // namespace tltest
