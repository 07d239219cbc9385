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

#include "models/transformer.hpp"

#include <cmath>

#include "models/session.hpp"

namespace translit::models {

using ag::Var;

template <typename T>
Transformer<T>::Transformer(TransformerConfig config, std::size_t src_vocab, std::size_t tgt_vocab)
    : config_(config), src_vocab_(src_vocab), tgt_vocab_(tgt_vocab) {
  config_.validate();
  const std::size_t d = config_.d_model;
  auto& P = this->params_;
  src_embed_ = P.add("src_embed.weight", {src_vocab, d});
  tgt_embed_ = P.add("tgt_embed.weight", {tgt_vocab, d});
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "encoder." + std::to_string(l) + ".";
    enc_.push_back({make_attn(p + "self_attn."), make_norm(p + "ln1."), make_ffn(p + "ffn."), make_norm(p + "ln2.")});
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "decoder." + std::to_string(l) + ".";
    dec_.push_back({make_attn(p + "self_attn."), make_norm(p + "ln1."), make_attn(p + "cross_attn."),
                    make_norm(p + "ln2."), make_ffn(p + "ffn."), make_norm(p + "ln3.")});
  }
  if (config_.tie_output) {
    P.alias("output.weight", "tgt_embed.weight");
    out_proj_ = tgt_embed_;
  } else {
    out_proj_ = P.add("output.weight", {tgt_vocab, d});
  }
  pe_.resize(config_.max_len * d);
  for (std::size_t pos = 0; pos < config_.max_len; ++pos) {
    const auto row = sinusoidal_pe(pos, d, config_.max_len);
    for (std::size_t j = 0; j < d; ++j) pe_[pos * d + j] = static_cast<T>(row[j]);
  }
}

template <typename T>
typename Transformer<T>::Attn Transformer<T>::make_attn(const std::string& p) {
  const std::size_t d = config_.d_model;
  auto& P = this->params_;
  Attn a;
  a.wq = P.add(p + "q.weight", {d, d});
  a.bq = P.add(p + "q.bias", {d});
  a.wk = P.add(p + "k.weight", {d, d});
  a.bk = P.add(p + "k.bias", {d});
  a.wv = P.add(p + "v.weight", {d, d});
  a.bv = P.add(p + "v.bias", {d});
  a.wo = P.add(p + "o.weight", {d, d});
  a.bo = P.add(p + "o.bias", {d});
  return a;
}

template <typename T>
typename Transformer<T>::Norm Transformer<T>::make_norm(const std::string& p) {
  auto& P = this->params_;
  return {P.add(p + "gamma", {config_.d_model}), P.add(p + "beta", {config_.d_model})};
}

template <typename T>
typename Transformer<T>::Ffn Transformer<T>::make_ffn(const std::string& p) {
  const std::size_t d = config_.d_model, f = config_.d_ff;
  auto& P = this->params_;
  return {P.add(p + "w1.weight", {d, f}), P.add(p + "w1.bias", {f}), P.add(p + "w2.weight", {f, d}),
          P.add(p + "w2.bias", {d})};
}

template <typename T>
Var<T> Transformer<T>::embed(ag::Graph<T>& g, const Var<T>& table, std::span<const std::int32_t> ids,
                             std::span<const std::size_t> positions) const {
  const std::size_t d = config_.d_model;
  auto pe = ag::make_tensor<T>({ids.size(), d});
  for (std::size_t r = 0; r < positions.size(); ++r) {
    if (positions[r] >= config_.max_len) {
      fail(ErrorKind::kInvalidArgument, "sequence position " + std::to_string(positions[r]) +
                                            " exceeds the model's max_len " + std::to_string(config_.max_len));
    }
    std::copy_n(pe_.data() + positions[r] * d, d, pe->value.data() + r * d);
  }
  auto e = ag::scale(g, ag::embedding(g, table, ids), static_cast<T>(std::sqrt(static_cast<double>(d))));
  return ag::add(g, e, pe);
}

template <typename T>
Var<T> Transformer<T>::norm(ag::Graph<T>& g, const Var<T>& x, const Norm& n) const {
  return ag::layer_norm(g, x, n.gamma, n.beta, static_cast<T>(config_.ln_eps));
}

template <typename T>
Var<T> Transformer<T>::ffn(ag::Graph<T>& g, const Var<T>& x, const Ffn& f, Rng* dropout) const {
  auto h = ag::relu(g, ag::linear(g, x, f.w1, f.b1));
  if (dropout) h = ag::dropout(g, h, config_.dropout, *dropout);
  return ag::linear(g, h, f.w2, f.b2);
}

template <typename T>
Var<T> Transformer<T>::output_logits(ag::Graph<T>& g, const Var<T>& y) const {
  return ag::matmul_bt(g, y, out_proj_);
}

namespace {

template <typename T>
Var<T> residual(ag::Graph<T>& g, const Var<T>& x, const Var<T>& sub, double p, Rng* dropout) {
  return ag::add(g, x, dropout ? ag::dropout(g, sub, p, *dropout) : sub);
}

template <typename T, typename A>
Var<T> attend(ag::Graph<T>& g, const A& a, const Var<T>& xq, const Var<T>& xkv, std::size_t heads,
              std::span<const ag::AttnSegment> segs) {
  auto q = ag::linear(g, xq, a.wq, a.bq);
  auto k = ag::linear(g, xkv, a.wk, a.bk);
  auto v = ag::linear(g, xkv, a.wv, a.bv);
  return ag::linear(g, ag::attention(g, q, k, v, heads, segs), a.wo, a.bo);
}

void pack(const std::vector<Ids>& seqs, bool drop_last, std::vector<std::int32_t>& ids,
          std::vector<std::size_t>& pos, std::vector<std::size_t>& offset, std::vector<std::size_t>& length) {
  for (const auto& s : seqs) {
    const std::size_t n = drop_last ? s.size() - 1 : s.size();
    offset.push_back(ids.size());
    length.push_back(n);
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(s[i]);
      pos.push_back(i);
    }
  }
}

}  // namespace

template <typename T>
typename Transformer<T>::Encoded Transformer<T>::encode(ag::Graph<T>& g, const std::vector<Ids>& src,
                                                        Rng* dropout) const {
  Encoded out;
  std::vector<std::int32_t> ids;
  std::vector<std::size_t> pos;
  for (const auto& s : src)
    if (s.empty()) fail(ErrorKind::kInvalidArgument, "encode: empty source sequence");
  pack(src, false, ids, pos, out.offset, out.length);
  std::vector<ag::AttnSegment> segs;
  for (std::size_t b = 0; b < src.size(); ++b) segs.push_back({out.offset[b], out.length[b], out.offset[b], out.length[b], -1});
  auto x = embed(g, src_embed_, ids, pos);
  if (dropout) x = ag::dropout(g, x, config_.dropout, *dropout);
  for (const auto& L : enc_) {
    x = norm(g, residual(g, x, attend(g, L.self, x, x, config_.heads, segs), config_.dropout, dropout), L.ln1);
    x = norm(g, residual(g, x, ffn(g, x, L.ffn, dropout), config_.dropout, dropout), L.ln2);
  }
  out.memory = x;
  return out;
}

template <typename T>
Forward<T> Transformer<T>::forward(ag::Graph<T>& g, const Batch& batch, Rng* dropout) const {
  if (batch.src.size() != batch.tgt.size() || batch.src.empty()) {
    fail(ErrorKind::kInvalidArgument, "forward: batch needs matching, non-empty source and target lists");
  }
  for (const auto& t : batch.tgt)
    if (t.size() < 2) fail(ErrorKind::kInvalidArgument, "forward: target must hold at least SOS and EOS");
  const Encoded enc = encode(g, batch.src, dropout);
  Forward<T> f;
  std::vector<std::int32_t> ids;
  std::vector<std::size_t> pos, off, len;
  pack(batch.tgt, true, ids, pos, off, len);
  std::vector<ag::AttnSegment> self, cross;
  for (std::size_t b = 0; b < batch.tgt.size(); ++b) {
    self.push_back({off[b], len[b], off[b], len[b], 0});
    cross.push_back({off[b], len[b], enc.offset[b], enc.length[b], -1});
    for (std::size_t i = 0; i < len[b]; ++i) {
      f.targets.push_back(batch.tgt[b][i + 1]);
      f.item.push_back(b);
      f.position.push_back(i);
    }
  }
  auto y = embed(g, tgt_embed_, ids, pos);
  if (dropout) y = ag::dropout(g, y, config_.dropout, *dropout);
  for (const auto& L : dec_) {
    y = norm(g, residual(g, y, attend(g, L.self, y, y, config_.heads, self), config_.dropout, dropout), L.ln1);
    y = norm(g, residual(g, y, attend(g, L.cross, y, enc.memory, config_.heads, cross), config_.dropout, dropout), L.ln2);
    y = norm(g, residual(g, y, ffn(g, y, L.ffn, dropout), config_.dropout, dropout), L.ln3);
  }
  f.logits = output_logits(g, y);
  return f;
}

namespace {

template <typename T>
struct TransformerState {
  std::size_t pos = 0;                 // target tokens consumed
  std::vector<std::vector<T>> k, v;    // per decoder layer, pos x d
  std::vector<double> logp;
};

template <typename T>
class TransformerScorer final : public CachedScorer<TransformerState<T>> {
  using State = TransformerState<T>;

 public:
  TransformerScorer(const Transformer<T>& model, std::vector<Ids> sources)
      : model_(model), n_(sources.size()) {
    ag::Graph<T> g(false);
    enc_ = model_.encode(g, sources, nullptr);
    for (const auto& L : model_.decoder_layers()) {
      mem_k_.push_back(ag::linear(g, enc_.memory, L.cross.wk, L.cross.bk));
      mem_v_.push_back(ag::linear(g, enc_.memory, L.cross.wv, L.cross.bv));
    }
  }

  std::size_t num_items() const override { return n_; }
  std::size_t vocab_size() const override { return model_.target_vocab_size(); }
  std::size_t max_prefix() const override { return model_.max_len(); }

 protected:
  std::shared_ptr<State> initial(std::size_t) const override {
    auto s = std::make_shared<State>();
    s->k.resize(model_.decoder_layers().size());
    s->v.resize(model_.decoder_layers().size());
    return s;
  }

  std::vector<std::shared_ptr<State>> advance(const std::vector<const State*>& parents,
                                              const std::vector<std::int32_t>& tokens,
                                              const std::vector<std::size_t>& items) const override {
    const std::size_t n = parents.size(), d = model_.config().d_model, heads = model_.config().heads;
    ag::Graph<T> g(false);
    std::vector<std::shared_ptr<State>> kids(n);
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      kids[i] = std::make_shared<State>(*parents[i]);
      kids[i]->pos = parents[i]->pos + 1;
      pos[i] = parents[i]->pos;
    }
    auto y = model_.embed(g, model_.target_embedding(), tokens, pos);
    std::vector<ag::AttnSegment> cross(n);
    for (std::size_t i = 0; i < n; ++i) cross[i] = {i, 1, enc_.offset[items[i]], enc_.length[items[i]], -1};
    const auto& layers = model_.decoder_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& L = layers[l];
      auto q = ag::linear(g, y, L.self.wq, L.self.bq);
      auto k = ag::linear(g, y, L.self.wk, L.self.bk);
      auto v = ag::linear(g, y, L.self.wv, L.self.bv);
      std::size_t total = 0;
      for (std::size_t i = 0; i < n; ++i) total += kids[i]->pos;
      auto kc = ag::make_tensor<T>({total, d});
      auto vc = ag::make_tensor<T>({total, d});
      std::vector<ag::AttnSegment> self(n);
      std::size_t off = 0;
      for (std::size_t i = 0; i < n; ++i) {
        auto& ks = kids[i]->k[l];
        auto& vs = kids[i]->v[l];
        ks.insert(ks.end(), k->value.begin() + static_cast<std::ptrdiff_t>(i * d),
                  k->value.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        vs.insert(vs.end(), v->value.begin() + static_cast<std::ptrdiff_t>(i * d),
                  v->value.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        std::copy(ks.begin(), ks.end(), kc->value.begin() + static_cast<std::ptrdiff_t>(off * d));
        std::copy(vs.begin(), vs.end(), vc->value.begin() + static_cast<std::ptrdiff_t>(off * d));
        self[i] = {i, 1, off, kids[i]->pos, -1};
        off += kids[i]->pos;
      }
      auto a = ag::linear(g, ag::attention(g, q, kc, vc, heads, self), L.self.wo, L.self.bo);
      y = model_.norm(g, ag::add(g, y, a), L.ln1);
      auto q2 = ag::linear(g, y, L.cross.wq, L.cross.bq);
      auto c = ag::linear(g, ag::attention(g, q2, mem_k_[l], mem_v_[l], heads, cross), L.cross.wo, L.cross.bo);
      y = model_.norm(g, ag::add(g, y, c), L.ln2);
      y = model_.norm(g, ag::add(g, y, model_.ffn(g, y, L.ffn, nullptr)), L.ln3);
    }
    auto logits = model_.output_logits(g, y);
    const std::size_t V = logits->cols();
    for (std::size_t i = 0; i < n; ++i) {
      log_softmax_row(logits->value.data() + i * V, V, kids[i]->logp);
    }
    return kids;
  }

 private:
  const Transformer<T>& model_;
  std::size_t n_;
  typename Transformer<T>::Encoded enc_;
  std::vector<Var<T>> mem_k_, mem_v_;
};

}  // namespace

template <typename T>
std::unique_ptr<decoder::Scorer> Transformer<T>::scorer(std::vector<Ids> sources) const {
  return std::make_unique<TransformerScorer<T>>(*this, std::move(sources));
}

template class Transformer<float>;
template class Transformer<double>;

}  // namespace translit::models
