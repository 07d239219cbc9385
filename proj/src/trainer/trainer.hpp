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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autograd/checkpoint.hpp"
#include "autograd/optim.hpp"
#include "json.hpp"
#include "models/model.hpp"
#include "vocab/vocab.hpp"

namespace translit {
class Config;
}

namespace translit::trainer {

using Json = nlohmann::ordered_json;
using StringPair = std::pair<std::string, std::string>;

struct TrainConfig {
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  ag::AdamWConfig adam;
  double clip_norm = 1.0;
  double label_smoothing = 0.1;
  double init_std = 0.02;
  double target_cer = 0;  // > 0 stops once validation CER reaches it
  std::size_t decode_max_len = 128;

  void validate() const;
  Json to_json() const;
  static TrainConfig from_config(const Config& c);
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double valid_loss = 0;
  double valid_cer = 0;
  double valid_exact = 0;
  double seconds = 0;  // wall clock; kept out of history.json
  bool improved = false;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_cer = 0;
  std::string stop_reason;  // patience, max-epochs, target-cer

  // Deterministic content only (no wall-clock fields).
  Json to_json() const;
  static TrainHistory from_json(const Json& j);
  Json timing_json() const;
};

// True when each of the last `patience` CERs is >= the best CER before them.
bool early_stop_check(std::span<const double> cer_history, std::size_t patience);

// The stopping rule as train() applies it, one validation CER per epoch.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Records the next epoch's CER; true means stop after this epoch.
  bool observe(double cer);

  std::size_t epochs() const { return cers_.size(); }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based; 0 before any epoch
  double best_cer() const { return best_cer_; }
  bool last_improved() const { return !cers_.empty() && best_epoch_ == cers_.size(); }

 private:
  std::size_t patience_;
  std::vector<double> cers_;
  std::size_t best_epoch_ = 0;
  double best_cer_ = std::numeric_limits<double>::infinity();
};

// Index batches for one epoch; order is a pure function of (seed, epoch)
// and the final partial batch is kept.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size, std::uint64_t seed,
                                                   std::size_t epoch);

struct TrainOptions {
  // When set, best.ckpt and last.ckpt are written here after each epoch.
  std::optional<std::filesystem::path> out_dir;
  // Continue from a last.ckpt written by an earlier run.
  std::optional<std::filesystem::path> resume;
  std::function<void(const EpochRecord&)> on_epoch;
  Json metadata = Json::object();  // copied into checkpoint train_state
};

struct TrainResult {
  TrainHistory history;
  ag::Checkpoint best;  // the model at best_epoch
};

// Trains `model` (initialised here unless resuming) and leaves it holding
// the best-epoch parameters.
TrainResult train(models::Seq2Seq<float>& model, const vocab::VocabPair& vocab, std::span<const StringPair> train_pairs,
                  std::span<const StringPair> valid_pairs, const TrainConfig& config, const TrainOptions& options = {});

// Greedy transliterations of `sources` in chunks of `chunk` items.
std::vector<std::string> greedy_transliterate(const models::Seq2Seq<float>& model, const vocab::VocabPair& vocab,
                                              std::span<const std::string> sources, std::size_t max_len,
                                              std::size_t chunk = 256);

}  // namespace translit::trainer
