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

#include "models/bilstm.hpp"

#include <cmath>

#include "models/session.hpp"

namespace translit::models {

using ag::Var;

template <typename T>
BiLstm<T>::BiLstm(BiLstmConfig config, std::size_t src_vocab, std::size_t tgt_vocab)
    : config_(config), src_vocab_(src_vocab), tgt_vocab_(tgt_vocab) {
  config_.validate();
  const std::size_t E = config_.embedding_dim, H = config_.hidden_size, D = config_.decoder_hidden,
                    A = config_.attention_dim;
  auto& P = this->params_;
  src_embed_ = P.add("src_embed.weight", {src_vocab, E});
  tgt_embed_ = P.add("tgt_embed.weight", {tgt_vocab, E});
  fwd_ = make_lstm("encoder.fwd.", E, H);
  bwd_ = make_lstm("encoder.bwd.", E, H);
  bridge_w_ = P.add("bridge.weight", {2 * H, D});
  bridge_b_ = P.add("bridge.bias", {D});
  dec_ = make_lstm("decoder.", config_.input_feeding ? E + 2 * H : E, D);
  attn_q_ = P.add("attn.query.weight", {D, A});
  attn_qb_ = P.add("attn.query.bias", {A});
  attn_k_ = P.add("attn.key.weight", {2 * H, A});
  attn_v_ = P.add("attn.score.weight", {A});
  out_w_ = P.add("output.weight", {D + 2 * H, tgt_vocab});
  out_b_ = P.add("output.bias", {tgt_vocab});
}

template <typename T>
typename BiLstm<T>::Lstm BiLstm<T>::make_lstm(const std::string& p, std::size_t in, std::size_t hidden) {
  auto& P = this->params_;
  return {P.add(p + "wx.weight", {in, 4 * hidden}), P.add(p + "wh.weight", {hidden, 4 * hidden}),
          P.add(p + "bias", {4 * hidden})};
}

template <typename T>
typename BiLstm<T>::Encoded BiLstm<T>::encode(ag::Graph<T>& g, const std::vector<Ids>& src, Rng* dropout) const {
  const std::size_t B = src.size(), H = config_.hidden_size;
  Encoded enc;
  for (const auto& s : src) {
    if (s.empty()) fail(ErrorKind::kInvalidArgument, "encode: empty source sequence");
    if (s.size() > config_.max_len) {
      fail(ErrorKind::kInvalidArgument, "source of length " + std::to_string(s.size()) + " exceeds max_len " +
                                            std::to_string(config_.max_len));
    }
    enc.S = std::max(enc.S, s.size());
    enc.length.push_back(s.size());
  }
  const std::size_t S = enc.S;
  std::vector<std::int32_t> ids(S * B, vocab::kPad);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < src[b].size(); ++t) ids[t * B + b] = src[b][t];
  auto emb = ag::embedding(g, src_embed_, ids);
  if (dropout) emb = ag::dropout(g, emb, config_.dropout, *dropout);
  auto xf = ag::linear(g, emb, fwd_.wx, fwd_.bias);
  auto xb = ag::linear(g, emb, bwd_.wx, bwd_.bias);

  auto run = [&](const Var<T>& xp, const Lstm& cell, bool reverse, std::vector<Var<T>>& outs) {
    auto h = ag::make_tensor<T>({B, H});
    auto c = ag::make_tensor<T>({B, H});
    outs.assign(S, nullptr);
    std::vector<std::size_t> rows(B);
    std::vector<std::uint8_t> keep(B);
    for (std::size_t k = 0; k < S; ++k) {
      const std::size_t t = reverse ? S - 1 - k : k;
      for (std::size_t b = 0; b < B; ++b) {
        rows[b] = t * B + b;
        keep[b] = t < src[b].size();
      }
      auto gates = ag::add(g, ag::gather_rows(g, xp, rows), ag::matmul(g, h, cell.wh));
      auto [h2, c2] = ag::lstm_cell(g, gates, c);
      h = ag::select_rows(g, h2, h, keep);
      c = ag::select_rows(g, c2, c, keep);
      outs[t] = h;
    }
    return h;
  };
  std::vector<Var<T>> of, ob;
  auto hf = run(xf, fwd_, false, of);
  auto hb = run(xb, bwd_, true, ob);
  auto states_t = ag::concat_cols(g, {ag::concat_rows(g, of), ag::concat_rows(g, ob)});
  std::vector<std::size_t> perm(B * S);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < S; ++t) perm[b * S + t] = t * B + b;
  enc.states = ag::gather_rows(g, states_t, perm);
  enc.keys = ag::matmul(g, enc.states, attn_k_);
  enc.s0 = ag::tanh(g, ag::linear(g, ag::concat_cols(g, {hf, hb}), bridge_w_, bridge_b_));
  return enc;
}

template <typename T>
typename BiLstm<T>::Step BiLstm<T>::step(ag::Graph<T>& g, const Encoded& enc, const Var<T>& s, const Var<T>& c,
                                         const Var<T>& ctx, std::span<const std::int32_t> tokens,
                                         std::span<const std::size_t> begin, std::span<const std::size_t> len,
                                         Rng* dropout, std::vector<T>* weights) const {
  auto e = ag::embedding(g, tgt_embed_, tokens);
  if (dropout) e = ag::dropout(g, e, config_.dropout, *dropout);
  auto x = config_.input_feeding ? ag::concat_cols(g, {e, ctx}) : e;
  auto gates = ag::add(g, ag::linear(g, x, dec_.wx, dec_.bias), ag::matmul(g, s, dec_.wh));
  auto [s2, c2] = ag::lstm_cell(g, gates, c);
  auto q = ag::linear(g, s2, attn_q_, attn_qb_);
  auto ctx2 = ag::additive_attention(g, q, enc.keys, attn_v_, enc.states, begin, len, weights);
  auto o = ag::concat_cols(g, {s2, ctx2});
  if (dropout) o = ag::dropout(g, o, config_.dropout, *dropout);
  return {s2, c2, ctx2, ag::linear(g, o, out_w_, out_b_)};
}

template <typename T>
Forward<T> BiLstm<T>::forward(ag::Graph<T>& g, const Batch& batch, Rng* dropout) const {
  return forward_with_attention(g, batch, dropout, nullptr);
}

template <typename T>
Forward<T> BiLstm<T>::forward_with_attention(ag::Graph<T>& g, const Batch& batch, Rng* dropout,
                                             std::vector<std::vector<T>>* weights) const {
  if (batch.src.size() != batch.tgt.size() || batch.src.empty()) {
    fail(ErrorKind::kInvalidArgument, "forward: batch needs matching, non-empty source and target lists");
  }
  const std::size_t B = batch.src.size();
  std::size_t steps = 0;
  for (const auto& t : batch.tgt) {
    if (t.size() < 2) fail(ErrorKind::kInvalidArgument, "forward: target must hold at least SOS and EOS");
    if (t.size() > config_.max_len) fail(ErrorKind::kInvalidArgument, "target exceeds max_len");
    steps = std::max(steps, t.size() - 1);
  }
  const Encoded enc = encode(g, batch.src, dropout);
  std::vector<std::size_t> begin(B);
  for (std::size_t b = 0; b < B; ++b) begin[b] = b * enc.S;
  Var<T> s = enc.s0;
  Var<T> c = ag::make_tensor<T>({B, config_.decoder_hidden});
  Var<T> ctx = ag::make_tensor<T>({B, 2 * config_.hidden_size});
  Forward<T> f;
  std::vector<Var<T>> logits;
  std::vector<std::int32_t> tok(B);
  std::vector<std::uint8_t> keep(B);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < B; ++b) {
      const bool live = t + 1 < batch.tgt[b].size();
      keep[b] = live;
      tok[b] = live ? batch.tgt[b][t] : vocab::kPad;
      f.targets.push_back(live ? batch.tgt[b][t + 1] : vocab::kPad);
      f.item.push_back(b);
      f.position.push_back(t);
    }
    std::vector<T> w;
    Step st = step(g, enc, s, c, ctx, tok, begin, enc.length, dropout, weights ? &w : nullptr);
    if (weights) weights->push_back(std::move(w));
    s = ag::select_rows(g, st.s, s, keep);
    c = ag::select_rows(g, st.c, c, keep);
    ctx = ag::select_rows(g, st.ctx, ctx, keep);
    logits.push_back(st.logits);
  }
  f.logits = ag::concat_rows(g, logits);
  return f;
}

namespace {

template <typename T>
struct LstmState {
  std::vector<T> s, c, ctx;
  std::vector<double> logp;
};

template <typename T>
class BiLstmScorer final : public CachedScorer<LstmState<T>> {
  using State = LstmState<T>;

 public:
  BiLstmScorer(const BiLstm<T>& model, std::vector<Ids> sources) : model_(model), n_(sources.size()) {
    ag::Graph<T> g(false);
    enc_ = model_.encode(g, sources, nullptr);
  }

  std::size_t num_items() const override { return n_; }
  std::size_t vocab_size() const override { return model_.target_vocab_size(); }
  std::size_t max_prefix() const override { return model_.max_len(); }

 protected:
  std::shared_ptr<State> initial(std::size_t item) const override {
    auto st = std::make_shared<State>();
    const std::size_t D = model_.config().decoder_hidden;
    st->s.assign(enc_.s0->value.begin() + static_cast<std::ptrdiff_t>(item * D),
                 enc_.s0->value.begin() + static_cast<std::ptrdiff_t>((item + 1) * D));
    st->c.assign(D, T(0));
    st->ctx.assign(2 * model_.config().hidden_size, T(0));
    return st;
  }

  std::vector<std::shared_ptr<State>> advance(const std::vector<const State*>& parents,
                                              const std::vector<std::int32_t>& tokens,
                                              const std::vector<std::size_t>& items) const override {
    const std::size_t n = parents.size();
    const std::size_t D = model_.config().decoder_hidden, C = 2 * model_.config().hidden_size;
    ag::Graph<T> g(false);
    auto s = ag::make_tensor<T>({n, D});
    auto c = ag::make_tensor<T>({n, D});
    auto ctx = ag::make_tensor<T>({n, C});
    std::vector<std::size_t> begin(n), len(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(parents[i]->s.begin(), parents[i]->s.end(), s->value.begin() + static_cast<std::ptrdiff_t>(i * D));
      std::copy(parents[i]->c.begin(), parents[i]->c.end(), c->value.begin() + static_cast<std::ptrdiff_t>(i * D));
      std::copy(parents[i]->ctx.begin(), parents[i]->ctx.end(), ctx->value.begin() + static_cast<std::ptrdiff_t>(i * C));
      begin[i] = items[i] * enc_.S;
      len[i] = enc_.length[items[i]];
    }
    auto st = model_.step(g, enc_, s, c, ctx, tokens, begin, len, nullptr);
    const std::size_t V = st.logits->cols();
    std::vector<std::shared_ptr<State>> kids(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto k = std::make_shared<State>();
      k->s.assign(st.s->value.begin() + static_cast<std::ptrdiff_t>(i * D), st.s->value.begin() + static_cast<std::ptrdiff_t>((i + 1) * D));
      k->c.assign(st.c->value.begin() + static_cast<std::ptrdiff_t>(i * D), st.c->value.begin() + static_cast<std::ptrdiff_t>((i + 1) * D));
      k->ctx.assign(st.ctx->value.begin() + static_cast<std::ptrdiff_t>(i * C),
                    st.ctx->value.begin() + static_cast<std::ptrdiff_t>((i + 1) * C));
      log_softmax_row(st.logits->value.data() + i * V, V, k->logp);
      kids[i] = std::move(k);
    }
    return kids;
  }

 private:
  const BiLstm<T>& model_;
  std::size_t n_;
  typename BiLstm<T>::Encoded enc_;
};

}  // namespace

template <typename T>
std::unique_ptr<decoder::Scorer> BiLstm<T>::scorer(std::vector<Ids> sources) const {
  return std::make_unique<BiLstmScorer<T>>(*this, std::move(sources));
}

template class BiLstm<float>;
template class BiLstm<double>;

}  // namespace translit::models
