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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autograd/checkpoint.hpp"
#include "autograd/ops.hpp"
#include "common/rng.hpp"
#include "decoder/scorer.hpp"
#include "json.hpp"
#include "vocab/vocab.hpp"

namespace translit {
class Config;
}

namespace translit::models {

using Json = nlohmann::ordered_json;
using Ids = std::vector<std::int32_t>;

inline constexpr const char* kTransformerArch = "transformer-char-v1";
inline constexpr const char* kBiLstmArch = "bilstm-char-v1";

struct TransformerConfig {
  std::size_t layers = 3;
  std::size_t d_model = 256;
  std::size_t heads = 8;
  std::size_t d_ff = 512;
  double dropout = 0.1;
  std::size_t max_len = 128;
  bool tie_output = true;
  double ln_eps = 1e-5;

  void validate() const;
  Json to_json() const;
  static TransformerConfig from_json(const Json& j);
  static TransformerConfig from_config(const Config& c);
};

struct BiLstmConfig {
  std::size_t embedding_dim = 256;
  std::size_t hidden_size = 256;  // per direction
  std::size_t decoder_hidden = 256;
  std::size_t attention_dim = 256;
  double dropout = 0.1;
  bool input_feeding = false;
  std::size_t max_len = 128;

  void validate() const;
  Json to_json() const;
  static BiLstmConfig from_json(const Json& j);
  static BiLstmConfig from_config(const Config& c);
};

// A padded-free batch: each source and target is an id sequence framed by
// SOS and EOS.
struct Batch {
  std::vector<Ids> src;
  std::vector<Ids> tgt;
};

// Teacher-forced decoder outputs. Row r predicts targets[r] for
// (item[r], position[r]); rows whose target is PAD are ignored by the loss.
template <typename T>
struct Forward {
  ag::Var<T> logits;
  std::vector<std::int32_t> targets;
  std::vector<std::size_t> item;
  std::vector<std::size_t> position;
};

template <typename T>
class Seq2Seq {
 public:
  virtual ~Seq2Seq() = default;

  virtual const char* arch() const = 0;
  virtual Json config_json() const = 0;
  virtual std::size_t source_vocab_size() const = 0;
  virtual std::size_t target_vocab_size() const = 0;
  virtual std::size_t max_len() const = 0;

  ag::ParamStore<T>& params() { return params_; }
  const ag::ParamStore<T>& params() const { return params_; }

  // Weights ~ N(0, std), biases zero, layer-norm gains one.
  void init(std::uint64_t seed, double std);

  // `dropout` null disables dropout.
  virtual Forward<T> forward(ag::Graph<T>& g, const Batch& batch, Rng* dropout) const = 0;
  ag::Var<T> loss(ag::Graph<T>& g, const Batch& batch, double label_smoothing, Rng* dropout) const;

  // Incremental decoder over fixed sources; the model must outlive it.
  virtual std::unique_ptr<decoder::Scorer> scorer(std::vector<Ids> sources) const = 0;

 protected:
  ag::ParamStore<T> params_;
};

template <typename T>
std::unique_ptr<Seq2Seq<T>> make_model(const std::string& arch, const Json& config, std::size_t src_vocab,
                                       std::size_t tgt_vocab);

// Sinusoidal encoding of one position (d values).
std::vector<double> sinusoidal_pe(std::size_t position, std::size_t d_model, std::size_t max_len);

// Model plus the vocabularies it was trained with.
struct ModelBundle {
  std::unique_ptr<Seq2Seq<float>> model;
  vocab::CharVocab source;
  vocab::CharVocab target;
};

ag::Checkpoint to_checkpoint(const Seq2Seq<float>& model, const vocab::CharVocab& src, const vocab::CharVocab& tgt);
ModelBundle from_checkpoint(const ag::Checkpoint& ckpt);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace translit::models
