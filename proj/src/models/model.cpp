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

#include "models/model.hpp"

#include <cmath>

#include "config/config.hpp"
#include "models/bilstm.hpp"
#include "models/transformer.hpp"

namespace translit::models {
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::size_t positive(const Config& c, const std::string& key) {
  const auto v = c.get_int(key);
  if (v <= 0) fail(ErrorKind::kConfig, key + " must be positive");
  return static_cast<std::size_t>(v);
}

template <typename U>
U field(const Json& j, const char* key, U fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<U>();
  } catch (const Json::exception&) {
    fail(ErrorKind::kParse, std::string("model config field '") + key + "' has the wrong type");
  }
}

}  // namespace

void TransformerConfig::validate() const {
  if (layers == 0 || d_model == 0 || heads == 0 || d_ff == 0 || max_len == 0) {
    fail(ErrorKind::kConfig, "transformer extents must be positive");
  }
  if (d_model % heads != 0) fail(ErrorKind::kConfig, "transformer d_model must be divisible by heads");
  if (d_model % 2 != 0) fail(ErrorKind::kConfig, "transformer d_model must be even");
  if (dropout < 0 || dropout >= 1) fail(ErrorKind::kConfig, "dropout must be in [0, 1)");
  if (!(ln_eps > 0)) fail(ErrorKind::kConfig, "ln_eps must be positive");
}

Json TransformerConfig::to_json() const {
  Json j = Json::object();
  j["layers"] = layers;
  j["d_model"] = d_model;
  j["heads"] = heads;
  j["d_ff"] = d_ff;
  j["dropout"] = dropout;
  j["max_len"] = max_len;
  j["tie_output"] = tie_output;
  j["ln_eps"] = ln_eps;
  return j;
}

TransformerConfig TransformerConfig::from_json(const Json& j) {
  TransformerConfig c;
  c.layers = field(j, "layers", c.layers);
  c.d_model = field(j, "d_model", c.d_model);
  c.heads = field(j, "heads", c.heads);
  c.d_ff = field(j, "d_ff", c.d_ff);
  c.dropout = field(j, "dropout", c.dropout);
  c.max_len = field(j, "max_len", c.max_len);
  c.tie_output = field(j, "tie_output", c.tie_output);
  c.ln_eps = field(j, "ln_eps", c.ln_eps);
  c.validate();
  return c;
}

TransformerConfig TransformerConfig::from_config(const Config& cfg) {
  TransformerConfig c;
  c.layers = positive(cfg, "transformer.layers");
  c.d_model = positive(cfg, "transformer.d_model");
  c.heads = positive(cfg, "transformer.heads");
  c.d_ff = positive(cfg, "transformer.d_ff");
  c.dropout = cfg.get_double("transformer.dropout");
  c.max_len = positive(cfg, "transformer.max_len");
  c.tie_output = cfg.get_bool("transformer.tie_output");
  c.ln_eps = cfg.get_double("transformer.ln_eps");
  c.validate();
  return c;
}

void BiLstmConfig::validate() const {
  if (embedding_dim == 0 || hidden_size == 0 || decoder_hidden == 0 || attention_dim == 0 || max_len == 0) {
    fail(ErrorKind::kConfig, "bilstm extents must be positive");
  }
  if (dropout < 0 || dropout >= 1) fail(ErrorKind::kConfig, "dropout must be in [0, 1)");
}

Json BiLstmConfig::to_json() const {
  Json j = Json::object();
  j["embedding_dim"] = embedding_dim;
  j["hidden_size"] = hidden_size;
  j["decoder_hidden"] = decoder_hidden;
  j["attention_dim"] = attention_dim;
  j["dropout"] = dropout;
  j["input_feeding"] = input_feeding;
  j["max_len"] = max_len;
  return j;
}

BiLstmConfig BiLstmConfig::from_json(const Json& j) {
  BiLstmConfig c;
  c.embedding_dim = field(j, "embedding_dim", c.embedding_dim);
  c.hidden_size = field(j, "hidden_size", c.hidden_size);
  c.decoder_hidden = field(j, "decoder_hidden", c.decoder_hidden);
  c.attention_dim = field(j, "attention_dim", c.attention_dim);
  c.dropout = field(j, "dropout", c.dropout);
  c.input_feeding = field(j, "input_feeding", c.input_feeding);
  c.max_len = field(j, "max_len", c.max_len);
  c.validate();
  return c;
}

BiLstmConfig BiLstmConfig::from_config(const Config& cfg) {
  BiLstmConfig c;
  c.embedding_dim = positive(cfg, "bilstm.embedding_dim");
  c.hidden_size = positive(cfg, "bilstm.hidden_size");
  c.decoder_hidden = positive(cfg, "bilstm.decoder_hidden");
  c.attention_dim = positive(cfg, "bilstm.attention_dim");
  c.dropout = cfg.get_double("bilstm.dropout");
  c.input_feeding = cfg.get_bool("bilstm.input_feeding");
  c.max_len = positive(cfg, "bilstm.max_len");
  c.validate();
  return c;
}

template <typename T>
void Seq2Seq<T>::init(std::uint64_t seed, double std) {
  Rng rng(stream_seed(seed, "init"));
  for (const auto& p : params_.params()) {
    if (ends_with(p->name, "gamma")) {
      std::fill(p->value.begin(), p->value.end(), T(1));
    } else if (ends_with(p->name, "beta") || ends_with(p->name, "bias")) {
      std::fill(p->value.begin(), p->value.end(), T(0));
    } else {
      for (auto& v : p->value) v = static_cast<T>(rng.normal() * std);
    }
  }
}

template <typename T>
ag::Var<T> Seq2Seq<T>::loss(ag::Graph<T>& g, const Batch& batch, double label_smoothing, Rng* dropout) const {
  Forward<T> f = forward(g, batch, dropout);
  return ag::cross_entropy(g, f.logits, f.targets, static_cast<T>(label_smoothing), vocab::kPad);
}

template class Seq2Seq<float>;
template class Seq2Seq<double>;

template <typename T>
std::unique_ptr<Seq2Seq<T>> make_model(const std::string& arch, const Json& config, std::size_t src_vocab,
                                       std::size_t tgt_vocab) {
  if (arch == kTransformerArch || arch == "transformer") {
    return std::make_unique<Transformer<T>>(TransformerConfig::from_json(config), src_vocab, tgt_vocab);
  }
  if (arch == kBiLstmArch || arch == "bilstm") {
    return std::make_unique<BiLstm<T>>(BiLstmConfig::from_json(config), src_vocab, tgt_vocab);
  }
  fail(ErrorKind::kInvalidArgument, "unknown architecture '" + arch + "' (expected transformer or bilstm)");
}

template std::unique_ptr<Seq2Seq<float>> make_model<float>(const std::string&, const Json&, std::size_t, std::size_t);
template std::unique_ptr<Seq2Seq<double>> make_model<double>(const std::string&, const Json&, std::size_t, std::size_t);

std::vector<double> sinusoidal_pe(std::size_t position, std::size_t d_model, std::size_t max_len) {
  if (position >= max_len) {
    fail(ErrorKind::kInvalidArgument, "position " + std::to_string(position) + " outside positional table of " +
                                          std::to_string(max_len));
  }
  std::vector<double> pe(d_model);
  for (std::size_t i = 0; i < d_model; i += 2) {
    const double angle = static_cast<double>(position) / std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d_model));
    pe[i] = std::sin(angle);
    if (i + 1 < d_model) pe[i + 1] = std::cos(angle);
  }
  return pe;
}

ag::Checkpoint to_checkpoint(const Seq2Seq<float>& model, const vocab::CharVocab& src, const vocab::CharVocab& tgt) {
  if (static_cast<std::size_t>(src.size()) != model.source_vocab_size() ||
      static_cast<std::size_t>(tgt.size()) != model.target_vocab_size()) {
    fail(ErrorKind::kInvalidArgument, "checkpoint: vocabulary sizes do not match the model");
  }
  ag::Checkpoint c;
  c.arch = model.arch();
  c.config = model.config_json();
  c.source_vocab = src.serialize();
  c.target_vocab = tgt.serialize();
  ag::store_params(model.params(), c);
  return c;
}

ModelBundle from_checkpoint(const ag::Checkpoint& ckpt) {
  ModelBundle b;
  b.source = vocab::CharVocab::parse(ckpt.source_vocab);
  b.target = vocab::CharVocab::parse(ckpt.target_vocab);
  b.model = make_model<float>(ckpt.arch, ckpt.config, static_cast<std::size_t>(b.source.size()),
                              static_cast<std::size_t>(b.target.size()));
  ag::restore_params(b.model->params(), ckpt);
  return b;
}

ModelBundle load_model(const std::filesystem::path& path) { return from_checkpoint(ag::Checkpoint::load(path)); }

}  // namespace translit::models
