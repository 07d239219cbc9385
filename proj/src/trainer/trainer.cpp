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

#include "trainer/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "common/rng.hpp"
#include "config/config.hpp"
#include "decoder/decoder.hpp"
#include "evaluation/metrics.hpp"

namespace translit::trainer {
namespace {

using Clock = std::chrono::steady_clock;

struct Encoded {
  std::vector<models::Ids> src;
  std::vector<models::Ids> tgt;
};

Encoded encode_pairs(const vocab::VocabPair& v, std::span<const StringPair> pairs) {
  Encoded e;
  for (const auto& [s, t] : pairs) {
    e.src.push_back(v.source.encode(s));
    e.tgt.push_back(v.target.encode(t));
  }
  return e;
}

models::Batch gather(const Encoded& e, std::span<const std::size_t> idx) {
  models::Batch b;
  for (auto i : idx) {
    b.src.push_back(e.src[i]);
    b.tgt.push_back(e.tgt[i]);
  }
  return b;
}

std::size_t target_tokens(const models::Batch& b) {
  std::size_t n = 0;
  for (const auto& t : b.tgt) n += t.size() - 1;
  return n;
}

double validation_loss(const models::Seq2Seq<float>& model, const Encoded& e, std::size_t batch_size) {
  double total = 0;
  std::size_t tokens = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < e.src.size(); start += batch_size) {
    idx.resize(std::min(batch_size, e.src.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const auto batch = gather(e, idx);
    ag::Graph<float> g(false);
    const auto loss = model.loss(g, batch, 0.0, nullptr);
    const std::size_t n = target_tokens(batch);
    total += static_cast<double>(loss->value[0]) * static_cast<double>(n);
    tokens += n;
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

Json epoch_json(const EpochRecord& r) {
  Json j = Json::object();
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["valid_loss"] = r.valid_loss;
  j["valid_cer"] = r.valid_cer;
  j["valid_exact"] = r.valid_exact;
  j["improved"] = r.improved;
  return j;
}

const char* kAdamM = "optim.m.";
const char* kAdamV = "optim.v.";
const char* kBest = "best.";

}  // namespace

void TrainConfig::validate() const {
  if (max_epochs == 0) fail(ErrorKind::kConfig, "train.max_epochs must be positive");
  if (patience == 0 || patience > max_epochs) fail(ErrorKind::kConfig, "train.patience must be in [1, max_epochs]");
  if (batch_size == 0) fail(ErrorKind::kConfig, "train.batch_size must be positive");
  if (!(adam.lr > 0) || !(adam.eps > 0)) fail(ErrorKind::kConfig, "train.lr and train.eps must be positive");
  if (!(adam.beta1 > 0 && adam.beta1 < 1) || !(adam.beta2 > 0 && adam.beta2 < 1))
    fail(ErrorKind::kConfig, "train.beta1 and train.beta2 must be in (0, 1)");
  if (adam.weight_decay < 0) fail(ErrorKind::kConfig, "train.weight_decay must be >= 0");
  if (!(clip_norm > 0)) fail(ErrorKind::kConfig, "train.clip_norm must be positive");
  if (label_smoothing < 0 || label_smoothing >= 1) fail(ErrorKind::kConfig, "train.label_smoothing must be in [0, 1)");
  if (!(init_std > 0)) fail(ErrorKind::kConfig, "train.init_std must be positive");
  if (target_cer < 0) fail(ErrorKind::kConfig, "train.target_cer must be >= 0");
  if (decode_max_len == 0) fail(ErrorKind::kConfig, "decode.max_len must be positive");
}

Json TrainConfig::to_json() const {
  Json j = Json::object();
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["lr"] = adam.lr;
  j["lr_schedule"] = "constant";
  j["beta1"] = adam.beta1;
  j["beta2"] = adam.beta2;
  j["eps"] = adam.eps;
  j["weight_decay"] = adam.weight_decay;
  j["clip_norm"] = clip_norm;
  j["label_smoothing"] = label_smoothing;
  j["init"] = {{"weights", "normal"}, {"std", init_std}, {"bias", 0.0}, {"norm_gain", 1.0}};
  j["target_cer"] = target_cer;
  j["validation_decode"] = "greedy";
  j["decode_max_len"] = decode_max_len;
  return j;
}

TrainConfig TrainConfig::from_config(const Config& c) {
  TrainConfig t;
  auto count = [&](const std::string& key) {
    const auto v = c.get_int(key);
    if (v < 0) fail(ErrorKind::kConfig, key + " must be non-negative");
    return static_cast<std::size_t>(v);
  };
  t.max_epochs = count("train.max_epochs");
  t.patience = count("train.patience");
  t.batch_size = count("train.batch_size");
  t.seed = static_cast<std::uint64_t>(count("train.seed"));
  t.adam.lr = c.get_double("train.lr");
  t.adam.beta1 = c.get_double("train.beta1");
  t.adam.beta2 = c.get_double("train.beta2");
  t.adam.eps = c.get_double("train.eps");
  t.adam.weight_decay = c.get_double("train.weight_decay");
  t.clip_norm = c.get_double("train.clip_norm");
  t.label_smoothing = c.get_double("train.label_smoothing");
  t.init_std = c.get_double("train.init_std");
  t.target_cer = c.get_double("train.target_cer");
  t.decode_max_len = count("decode.max_len");
  t.validate();
  return t;
}

Json TrainHistory::to_json() const {
  Json j = Json::object();
  j["epochs"] = Json::array();
  for (const auto& e : epochs) j["epochs"].push_back(epoch_json(e));
  j["best_epoch"] = best_epoch;
  j["best_valid_cer"] = best_cer;
  j["stop_reason"] = stop_reason;
  return j;
}

TrainHistory TrainHistory::from_json(const Json& j) {
  TrainHistory h;
  try {
    for (const auto& e : j.at("epochs")) {
      EpochRecord r;
      r.epoch = e.at("epoch").get<std::size_t>();
      r.train_loss = e.at("train_loss").get<double>();
      r.valid_loss = e.at("valid_loss").get<double>();
      r.valid_cer = e.at("valid_cer").get<double>();
      r.valid_exact = e.at("valid_exact").get<double>();
      r.improved = e.at("improved").get<bool>();
      h.epochs.push_back(r);
    }
    h.best_epoch = j.at("best_epoch").get<std::size_t>();
    h.best_cer = j.at("best_valid_cer").get<double>();
    h.stop_reason = j.at("stop_reason").get<std::string>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("malformed training history: ") + e.what());
  }
  return h;
}

Json TrainHistory::timing_json() const {
  Json j = Json::object();
  double total = 0;
  j["epochs"] = Json::array();
  for (const auto& e : epochs) {
    j["epochs"].push_back({{"epoch", e.epoch}, {"seconds", e.seconds}});
    total += e.seconds;
  }
  j["total_seconds"] = total;
  return j;
}

bool early_stop_check(std::span<const double> cer, std::size_t patience) {
  if (patience == 0 || cer.size() <= patience) return false;
  const std::size_t split = cer.size() - patience;
  const double best_before = *std::min_element(cer.begin(), cer.begin() + static_cast<std::ptrdiff_t>(split));
  for (std::size_t i = split; i < cer.size(); ++i)
    if (cer[i] < best_before) return false;
  return true;
}

bool EarlyStopping::observe(double cer) {
  cers_.push_back(cer);
  if (cer < best_cer_) {
    best_cer_ = cer;
    best_epoch_ = cers_.size();
  }
  return early_stop_check(cers_, patience_);
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size, std::uint64_t seed,
                                                   std::size_t epoch) {
  if (batch_size == 0) fail(ErrorKind::kInvalidArgument, "batch size must be positive");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(stream_seed(seed, "shuffle", epoch));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < count; start += batch_size) {
    const std::size_t end = std::min(count, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<std::string> greedy_transliterate(const models::Seq2Seq<float>& model, const vocab::VocabPair& vocab,
                                              std::span<const std::string> sources, std::size_t max_len,
                                              std::size_t chunk) {
  std::vector<std::string> out;
  out.reserve(sources.size());
  decoder::DecodeConfig dc;
  dc.beam = 1;
  dc.max_len = max_len;
  for (std::size_t start = 0; start < sources.size(); start += chunk) {
    std::vector<models::Ids> src;
    for (std::size_t i = start; i < std::min(sources.size(), start + chunk); ++i)
      src.push_back(vocab.source.encode(sources[i]));
    auto scorer = model.scorer(std::move(src));
    for (const auto& r : decoder::greedy_decode(*scorer, dc)) out.push_back(vocab.target.decode(r.best.tokens));
  }
  return out;
}

TrainResult train(models::Seq2Seq<float>& model, const vocab::VocabPair& vocab, std::span<const StringPair> train_pairs,
                  std::span<const StringPair> valid_pairs, const TrainConfig& cfg, const TrainOptions& opt) {
  cfg.validate();
  if (train_pairs.empty()) fail(ErrorKind::kInvalidArgument, "training split is empty");
  if (valid_pairs.empty()) fail(ErrorKind::kInvalidArgument, "validation split is empty");
  const Encoded train_set = encode_pairs(vocab, train_pairs);
  const Encoded valid_set = encode_pairs(vocab, valid_pairs);
  std::vector<std::string> valid_src, valid_ref;
  for (const auto& [s, t] : valid_pairs) {
    valid_src.push_back(s);
    valid_ref.push_back(t);
  }

  auto& store = model.params();
  const auto& params = store.params();
  ag::AdamW<float> optim(params, cfg.adam);
  TrainHistory hist;
  hist.best_cer = std::numeric_limits<double>::infinity();
  ag::Checkpoint best = models::to_checkpoint(model, vocab.source, vocab.target);
  best.kind = "model";
  std::size_t start_epoch = 1;

  if (opt.resume) {
    const auto last = ag::Checkpoint::load(*opt.resume);
    if (last.kind != "train-state" || !last.train_state)
      fail(ErrorKind::kInvalidArgument, "resume checkpoint has no training state: " + opt.resume->string());
    if (last.arch != model.arch() || last.config != model.config_json())
      fail(ErrorKind::kConfig, "resume checkpoint was written for a different model configuration");
    if (last.source_vocab != vocab.source.serialize() || last.target_vocab != vocab.target.serialize())
      fail(ErrorKind::kConfig, "resume checkpoint vocabulary does not match the training split");
    const Json& st = *last.train_state;
    if (st.at("train_config") != cfg.to_json())
      fail(ErrorKind::kConfig, "resume checkpoint was written with a different training configuration");
    ag::restore_params(store, last);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto* m = last.find(kAdamM + std::to_string(i));
      const auto* v = last.find(kAdamV + std::to_string(i));
      if (!m || !v) fail(ErrorKind::kParse, "resume checkpoint lacks optimizer moments");
      optim.first_moments()[i] = m->as<float>();
      optim.second_moments()[i] = v->as<float>();
    }
    optim.set_steps(st.at("optimizer_steps").get<std::uint64_t>());
    hist = TrainHistory::from_json(st.at("history"));
    if (hist.epochs.empty()) hist.best_cer = std::numeric_limits<double>::infinity();
    for (auto& e : hist.epochs) e.seconds = 0;
    {
      auto tmp = models::make_model<float>(model.arch(), model.config_json(), model.source_vocab_size(),
                                           model.target_vocab_size());
      ag::restore_params(tmp->params(), last, kBest);
      best = models::to_checkpoint(*tmp, vocab.source, vocab.target);
    }
    start_epoch = hist.epochs.size() + 1;
    if (!hist.stop_reason.empty()) start_epoch = cfg.max_epochs + 1;
  } else {
    model.init(cfg.seed, cfg.init_std);
  }

  auto save_state = [&](std::size_t) {
    if (!opt.out_dir) return;
    ensure_directory(*opt.out_dir);
    ag::Checkpoint last = models::to_checkpoint(model, vocab.source, vocab.target);
    last.kind = "train-state";
    Json st = Json::object();
    st["train_config"] = cfg.to_json();
    st["optimizer_steps"] = optim.steps();
    st["history"] = hist.to_json();
    st["metadata"] = opt.metadata;
    last.train_state = st;
    for (std::size_t i = 0; i < params.size(); ++i) {
      last.blocks.push_back(ag::Block::from<float>(kAdamM + std::to_string(i), params[i]->shape, optim.first_moments()[i]));
      last.blocks.push_back(ag::Block::from<float>(kAdamV + std::to_string(i), params[i]->shape, optim.second_moments()[i]));
    }
    for (const auto& b : best.blocks) {
      ag::Block copy = b;
      copy.name = kBest + b.name;
      last.blocks.push_back(std::move(copy));
    }
    last.save(*opt.out_dir / "last.ckpt");
  };

  EarlyStopping stopper(cfg.patience);
  for (const auto& e : hist.epochs) stopper.observe(e.valid_cer);

  for (std::size_t epoch = start_epoch; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = Clock::now();
    const auto batches = make_batches(train_set.src.size(), cfg.batch_size, cfg.seed, epoch);
    double loss_sum = 0;
    std::size_t loss_tokens = 0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto batch = gather(train_set, batches[bi]);
      Rng dropout(stream_seed(cfg.seed, "dropout", epoch, bi));
      ag::Graph<float> g(true);
      store.zero_grad();
      const auto loss = model.loss(g, batch, cfg.label_smoothing, &dropout);
      const double lv = loss->value[0];
      if (!std::isfinite(lv)) {
        fail(ErrorKind::kNumeric, "non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(bi) + " (loss " + std::to_string(lv) + ")");
      }
      g.backward(loss);
      const double norm = ag::clip_global_norm(params, cfg.clip_norm);
      if (!std::isfinite(norm)) {
        fail(ErrorKind::kNumeric, "non-finite gradient norm at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(bi));
      }
      optim.step();
      const std::size_t n = target_tokens(batch);
      loss_sum += lv * static_cast<double>(n);
      loss_tokens += n;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(loss_tokens);
    rec.valid_loss = validation_loss(model, valid_set, cfg.batch_size);
    const auto preds = greedy_transliterate(model, vocab, valid_src, cfg.decode_max_len);
    double cer_sum = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      cer_sum += evaluation::cer(preds[i], valid_ref[i]);
      hits += evaluation::exact_match(preds[i], valid_ref[i]) ? 1 : 0;
    }
    rec.valid_cer = cer_sum / static_cast<double>(preds.size());
    rec.valid_exact = static_cast<double>(hits) / static_cast<double>(preds.size());
    if (!std::isfinite(rec.valid_loss)) {
      fail(ErrorKind::kNumeric, "non-finite validation loss at epoch " + std::to_string(epoch));
    }
    const bool patience_hit = stopper.observe(rec.valid_cer);
    rec.improved = stopper.last_improved();
    if (rec.improved) {
      hist.best_cer = rec.valid_cer;
      hist.best_epoch = epoch;
      best = models::to_checkpoint(model, vocab.source, vocab.target);
      if (opt.out_dir) {
        ensure_directory(*opt.out_dir);
        best.save(*opt.out_dir / "best.ckpt");
      }
    }
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    hist.epochs.push_back(rec);

    if (cfg.target_cer > 0 && rec.valid_cer <= cfg.target_cer) {
      hist.stop_reason = "target-cer";
    } else if (patience_hit) {
      hist.stop_reason = "patience";
    } else if (epoch == cfg.max_epochs) {
      hist.stop_reason = "max-epochs";
    }
    save_state(epoch);
    if (opt.on_epoch) opt.on_epoch(rec);
    if (!hist.stop_reason.empty()) break;
  }
  if (hist.stop_reason.empty()) hist.stop_reason = "max-epochs";
  ag::restore_params(store, best);
  return {std::move(hist), std::move(best)};
}

}  // namespace translit::trainer
