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

// Post-norm encoder-decoder Transformer over characters. Batches are packed
// without padding; attention segments keep items apart.
template <typename T>
class Transformer final : public Seq2Seq<T> {
 public:
  Transformer(TransformerConfig config, std::size_t src_vocab, std::size_t tgt_vocab);

  const char* arch() const override { return kTransformerArch; }
  Json config_json() const override { return config_.to_json(); }
  std::size_t source_vocab_size() const override { return src_vocab_; }
  std::size_t target_vocab_size() const override { return tgt_vocab_; }
  std::size_t max_len() const override { return config_.max_len; }
  const TransformerConfig& config() const { return config_; }

  struct Encoded {
    ag::Var<T> memory;  // packed rows x d_model
    std::vector<std::size_t> offset;
    std::vector<std::size_t> length;
  };
  Encoded encode(ag::Graph<T>& g, const std::vector<Ids>& src, Rng* dropout) const;

  Forward<T> forward(ag::Graph<T>& g, const Batch& batch, Rng* dropout) const override;
  std::unique_ptr<decoder::Scorer> scorer(std::vector<Ids> sources) const override;

  struct Attn {
    ag::Var<T> wq, bq, wk, bk, wv, bv, wo, bo;
  };
  struct Norm {
    ag::Var<T> gamma, beta;
  };
  struct Ffn {
    ag::Var<T> w1, b1, w2, b2;
  };
  struct EncoderLayer {
    Attn self;
    Norm ln1;
    Ffn ffn;
    Norm ln2;
  };
  struct DecoderLayer {
    Attn self;
    Norm ln1;
    Attn cross;
    Norm ln2;
    Ffn ffn;
    Norm ln3;
  };

  // Building blocks shared by the teacher-forced and incremental paths.
  ag::Var<T> embed(ag::Graph<T>& g, const ag::Var<T>& table, std::span<const std::int32_t> ids,
                   std::span<const std::size_t> positions) const;
  ag::Var<T> norm(ag::Graph<T>& g, const ag::Var<T>& x, const Norm& n) const;
  ag::Var<T> ffn(ag::Graph<T>& g, const ag::Var<T>& x, const Ffn& f, Rng* dropout) const;
  ag::Var<T> output_logits(ag::Graph<T>& g, const ag::Var<T>& y) const;

  const ag::Var<T>& target_embedding() const { return tgt_embed_; }
  const std::vector<EncoderLayer>& encoder_layers() const { return enc_; }
  const std::vector<DecoderLayer>& decoder_layers() const { return dec_; }

 private:
  Attn make_attn(const std::string& prefix);
  Norm make_norm(const std::string& prefix);
  Ffn make_ffn(const std::string& prefix);

  TransformerConfig config_;
  std::size_t src_vocab_;
  std::size_t tgt_vocab_;
  ag::Var<T> src_embed_;
  ag::Var<T> tgt_embed_;
  ag::Var<T> out_proj_;  // same node as tgt_embed_ when tied
  std::vector<EncoderLayer> enc_;
  std::vector<DecoderLayer> dec_;
  std::vector<T> pe_;  // max_len x d_model
};

}  // namespace translit::models
