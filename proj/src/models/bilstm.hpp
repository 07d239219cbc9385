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
#include <vector>

#include "models/model.hpp"

namespace translit::models {

// Bidirectional LSTM encoder, tanh bridge to the decoder state, and a
// unidirectional LSTM decoder with additive attention computed from the
// current decoder state. Output: W [s_t; c_t] + b.
template <typename T>
class BiLstm final : public Seq2Seq<T> {
 public:
  BiLstm(BiLstmConfig config, std::size_t src_vocab, std::size_t tgt_vocab);

  const char* arch() const override { return kBiLstmArch; }
  Json config_json() const override { return config_.to_json(); }
  std::size_t source_vocab_size() const override { return src_vocab_; }
  std::size_t target_vocab_size() const override { return tgt_vocab_; }
  std::size_t max_len() const override { return config_.max_len; }
  const BiLstmConfig& config() const { return config_; }

  struct Encoded {
    ag::Var<T> states;  // (B*S) x 2H, row b*S + t
    ag::Var<T> keys;    // (B*S) x A
    ag::Var<T> s0;      // B x Hd
    std::size_t S = 0;
    std::vector<std::size_t> length;
  };
  Encoded encode(ag::Graph<T>& g, const std::vector<Ids>& src, Rng* dropout) const;

  struct Step {
    ag::Var<T> s, c, ctx, logits;
  };
  // One decoder step for rows with previous state (s, c, ctx) and input
  // tokens; row r attends key rows begin[r] .. begin[r] + len[r] - 1.
  Step step(ag::Graph<T>& g, const Encoded& enc, const ag::Var<T>& s, const ag::Var<T>& c, const ag::Var<T>& ctx,
            std::span<const std::int32_t> tokens, std::span<const std::size_t> begin,
            std::span<const std::size_t> len, Rng* dropout, std::vector<T>* weights = nullptr) const;

  Forward<T> forward(ag::Graph<T>& g, const Batch& batch, Rng* dropout) const override;
  // Same as forward, also returning the attention weights of every step.
  Forward<T> forward_with_attention(ag::Graph<T>& g, const Batch& batch, Rng* dropout,
                                    std::vector<std::vector<T>>* weights) const;
  std::unique_ptr<decoder::Scorer> scorer(std::vector<Ids> sources) const override;

 private:
  struct Lstm {
    ag::Var<T> wx, wh, bias;
  };
  Lstm make_lstm(const std::string& prefix, std::size_t in, std::size_t hidden);

  BiLstmConfig config_;
  std::size_t src_vocab_;
  std::size_t tgt_vocab_;
  ag::Var<T> src_embed_, tgt_embed_;
  Lstm fwd_, bwd_, dec_;
  ag::Var<T> bridge_w_, bridge_b_;
  ag::Var<T> attn_q_, attn_qb_, attn_k_, attn_v_;
  ag::Var<T> out_w_, out_b_;
};

}  // namespace translit::models
