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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Set TL_REAL_CORPUS to a raw JSONL corpus to enable the
// data-dependent checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "config/config.hpp"
#include "corpus/split.hpp"
#include "corpus/synthetic.hpp"
#include "decoder/decoder.hpp"
#include "evaluation/metrics.hpp"
#include "gradcheck.hpp"
#include "metric_oracles.hpp"
#include "model_cases.hpp"
#include "models/model.hpp"
#include "op_cases.hpp"
#include "pipeline/pipeline.hpp"
#include "rules/rules.hpp"
#include "table_check.hpp"
#include "test_util.hpp"
#include "textnorm/utf8.hpp"
#include "trainer/trainer.hpp"
#include "vocab/vocab.hpp"

using namespace translit;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 3) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

const char* real_corpus() {
  const char* p = std::getenv("TL_REAL_CORPUS");
  return p && *p ? p : nullptr;
}

std::vector<trainer::StringPair> pairs_of(const std::vector<corpus::LexiconRecord>& recs) {
  std::vector<trainer::StringPair> out;
  for (const auto& r : recs) out.emplace_back(r.tajik, r.persian);
  return out;
}

// 1 -------------------------------------------------------------------------
Outcome gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  double worst = 0;
  std::string worst_name;
  std::size_t checks = 0;
  auto record = [&](const std::string& name, std::uint64_t seed, const tltest::GradCheck& g) {
    checks += g.checked;
    if (g.max_rel > worst) {
      worst = g.max_rel;
      worst_name = name;
    }
    o.require(g.checked > 0 && g.max_rel < 1e-4, name + " seed " + std::to_string(seed) + " rel " + num(g.max_rel));
  };
  const auto cases = tltest::op_cases();
  for (auto seed : seeds)
    for (const auto& c : cases) record(c.name, seed, c.run(seed));
  for (auto seed : seeds) record("transformer loss", seed, tltest::model_grad_check("transformer", seed));
  for (auto seed : seeds) record("bilstm loss", seed, tltest::model_grad_check("bilstm", seed));
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "runtime < 120 s");
  o.note(std::to_string(cases.size()) + " ops + 2 model losses x 5 seeds, " + std::to_string(checks) +
         " tensors, max rel err " + num(worst) + " (" + worst_name + "), " + num(secs) + " s");
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome metrics() {
  Outcome o;
  const auto t0 = Clock::now();
  tltest::oracle::EditGraph graph("abc", 6);
  const auto& nodes = graph.nodes();
  std::size_t pairs = 0, lev_bad = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto d = graph.bfs(i);
    for (std::size_t j = 0; j < nodes.size(); ++j, ++pairs)
      if (evaluation::levenshtein(std::string_view(nodes[i]), std::string_view(nodes[j])) != d[j]) ++lev_bad;
  }
  o.require(lev_bad == 0, "levenshtein on " + std::to_string(lev_bad) + " pairs");

  const auto cases = tltest::oracle::hand_cases();
  double worst_cer = 0, worst_chrf = 0;
  std::size_t exact_bad = 0;
  for (const auto& [pred, ref] : cases) {
    worst_cer = std::max(worst_cer, std::fabs(evaluation::cer(pred, ref) - tltest::oracle::cer(pred, ref)));
    worst_chrf = std::max(worst_chrf, std::fabs(evaluation::chrf_pp(pred, ref) - tltest::oracle::chrf_pp(pred, ref)));
    if (evaluation::exact_match(pred, ref) != (tltest::oracle::cps(pred) == tltest::oracle::cps(ref))) ++exact_bad;
  }
  o.require(cases.size() == 50, "50 hand cases");
  o.require(worst_cer <= 1e-6, "cer within 1e-6");
  o.require(worst_chrf <= 1e-6, "chrF++ within 1e-6");
  o.require(exact_bad == 0, "exact match");
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime < 60 s");
  o.note(std::to_string(pairs) + " levenshtein pairs, " + std::to_string(cases.size()) + " hand cases, max |dCER| " +
         num(worst_cer) + ", max |dchrF| " + num(worst_chrf) + ", " + num(secs) + " s");
  return o;
}

// 3 -------------------------------------------------------------------------
std::vector<double> probs(double eos, double a, double b) { return {0, 0, eos, 0, a, b}; }

Outcome decoding() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto recs = corpus::cipher_corpus(200, 11);
  const auto pairs = pairs_of(recs);
  const auto vocab = vocab::build_vocab(pairs);
  models::TransformerConfig mc;
  mc.layers = 2;
  mc.d_model = 32;
  mc.heads = 4;
  mc.d_ff = 64;
  mc.dropout = 0.1;
  mc.max_len = 48;
  auto model = models::make_model<float>("transformer", mc.to_json(), vocab.source.size(), vocab.target.size());
  trainer::TrainConfig tc;
  tc.max_epochs = 15;
  tc.patience = 15;
  tc.batch_size = 16;
  tc.adam.lr = 3e-3;
  tc.decode_max_len = 32;
  trainer::train(*model, vocab, pairs, pairs, tc);
  const auto bundle = models::from_checkpoint(
      ag::Checkpoint::parse(models::to_checkpoint(*model, vocab.source, vocab.target).serialize()));

  // Random words over the Tajik alphabet, mostly unseen in training.
  const std::u32string letters = corpus::Cipher().letters();
  Rng rng(stream_seed(2024, "acceptance-decode"));
  std::vector<models::Ids> inputs;
  for (int i = 0; i < 120; ++i) {
    std::u32string w;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t k = 0; k < n; ++k) w.push_back(letters[rng.below(letters.size())]);
    inputs.push_back(bundle.source.encode(utf8::encode(w)));
  }
  decoder::DecodeConfig dc;
  dc.max_len = 40;
  auto run = [&](bool greedy, std::size_t k) {
    auto scorer = bundle.model->scorer(inputs);
    dc.beam = k;
    return greedy ? decoder::greedy_decode(*scorer, dc) : decoder::beam_decode(*scorer, dc);
  };
  const auto g = run(true, 1), b1 = run(false, 1), b3 = run(false, 3);
  std::size_t same = 0, monotone = 0;
  double worst_gap = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (bundle.target.decode(g[i].best.tokens) == bundle.target.decode(b1[i].best.tokens) &&
        g[i].best.tokens == b1[i].best.tokens)
      ++same;
    if (b3[i].best.score >= b1[i].best.score)
      ++monotone;
    else
      worst_gap = std::max(worst_gap, b1[i].best.score - b3[i].best.score);
  }
  o.require(same == inputs.size(), "k=1 equals greedy (" + std::to_string(same) + "/" + std::to_string(inputs.size()) + ")");
  o.require(monotone == inputs.size(), "k=3 score >= k=1 score (" + std::to_string(monotone) + "/" +
                                           std::to_string(inputs.size()) + ", worst gap " + num(worst_gap) + ")");

  decoder::TableScorer ce(6, 4, probs(0.5, 0.25, 0.25));
  ce.set({vocab::kSos}, probs(0.0, 0.55, 0.45));
  ce.set({vocab::kSos, 4}, probs(0.4, 0.3, 0.3));
  ce.set({vocab::kSos, 5}, probs(0.9, 0.05, 0.05));
  decoder::DecodeConfig cc;
  cc.alpha = 0.6;
  cc.max_len = 3;
  cc.beam = 1;
  const auto greedy_ce = decoder::greedy_decode(ce, cc)[0].best;
  cc.beam = 2;
  const auto beam_ce = decoder::beam_decode(ce, cc)[0].best;
  const auto oracle = decoder::exhaustive_best(ce, 3, 0.6);
  o.require(greedy_ce.score < oracle.score, "counterexample defeats greedy");
  o.require(beam_ce.tokens == oracle.tokens && std::fabs(beam_ce.score - oracle.score) < 1e-12,
            "k=2 matches the exhaustive optimum");
  o.note(std::to_string(inputs.size()) + " inputs, k=1==greedy " + std::to_string(same) + ", k=3>=k=1 " +
         std::to_string(monotone) + "; counterexample greedy " + num(greedy_ce.score, 5) + " vs k=2 " +
         num(beam_ce.score, 5) + " = exhaustive " + num(oracle.score, 5) + ", " + num(seconds_since(t0)) + " s");
  return o;
}

// 4 -------------------------------------------------------------------------
struct OverfitRun {
  trainer::TrainHistory history;
  double cer = 1, exact = 0, seconds = 0;
};

OverfitRun overfit(const std::string& arch, const Json& cfg, double lr) {
  const auto pairs = pairs_of(corpus::cipher_corpus(200, 42));
  const auto vocab = vocab::build_vocab(pairs);
  auto model = models::make_model<float>(arch, cfg, vocab.source.size(), vocab.target.size());
  trainer::TrainConfig tc;
  tc.max_epochs = 200;
  tc.patience = 200;
  tc.batch_size = 16;
  tc.adam.lr = lr;
  tc.label_smoothing = 0;
  tc.target_cer = 1e-4;
  tc.decode_max_len = 32;
  const auto t0 = Clock::now();
  OverfitRun r;
  r.history = trainer::train(*model, vocab, pairs, pairs, tc).history;
  r.seconds = seconds_since(t0);
  std::vector<std::string> src;
  for (const auto& p : pairs) src.push_back(p.first);
  const auto pred = trainer::greedy_transliterate(*model, vocab, src, 32);
  double cer = 0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    cer += evaluation::cer(pred[i], pairs[i].second);
    hit += evaluation::exact_match(pred[i], pairs[i].second);
  }
  r.cer = cer / pairs.size();
  r.exact = static_cast<double>(hit) / pairs.size();
  return r;
}

Outcome overfitting() {
  Outcome o;
  models::TransformerConfig t;
  t.layers = 2;
  t.d_model = 128;
  t.heads = 4;
  t.d_ff = 256;
  t.dropout = 0;
  t.max_len = 48;
  const auto tr = overfit("transformer", t.to_json(), 1e-3);
  o.require(tr.cer < 0.02, "Transformer CER < 0.02 (" + num(tr.cer) + ")");
  o.require(tr.exact > 0.95, "Transformer exact > 0.95 (" + num(tr.exact) + ")");
  o.require(tr.history.epochs.size() <= 200, "Transformer within 200 epochs");
  o.require(tr.seconds < 300, "Transformer < 5 min");
  models::BiLstmConfig b;
  b.embedding_dim = 64;
  b.hidden_size = 128;
  b.decoder_hidden = 128;
  b.attention_dim = 64;
  b.dropout = 0;
  b.max_len = 48;
  const auto bl = overfit("bilstm", b.to_json(), 3e-3);
  o.require(bl.cer < 0.05, "BiLSTM CER < 0.05 (" + num(bl.cer) + ")");
  o.note("Transformer 2x128: CER " + num(tr.cer) + ", exact " + num(tr.exact) + " after " +
         std::to_string(tr.history.epochs.size()) + " epochs, " + num(tr.seconds) + " s; BiLSTM: CER " + num(bl.cer) +
         ", exact " + num(bl.exact) + " after " + std::to_string(bl.history.epochs.size()) + " epochs, " +
         num(bl.seconds) + " s");
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome early_stopping() {
  Outcome o;
  trainer::EarlyStopping s(5);
  std::size_t stopped = 0;
  for (double c : {0.5, 0.4, 0.41, 0.42, 0.43, 0.44, 0.45})
    if (s.observe(c)) {
      stopped = s.epochs();
      break;
    }
  o.require(stopped == 7, "stops after epoch 7");
  o.require(s.best_epoch() == 2, "best_epoch 2");
  o.note("stopped after epoch " + std::to_string(stopped) + ", best_epoch " + std::to_string(s.best_epoch()));
  return o;
}

// 6 -------------------------------------------------------------------------
// Largest cell deviation from ratio * stratum size.
double cell_deviation(const corpus::SplitBundle& b, const std::array<double, 3>& ratios) {
  std::map<int, std::array<std::size_t, 3>> cells;
  for (int s = 0; s < 3; ++s)
    for (const auto& r : b.splits[s]) ++cells[static_cast<int>(r.pos)][s];
  double worst = 0;
  for (const auto& [pos, c] : cells) {
    const double n = static_cast<double>(c[0] + c[1] + c[2]);
    for (int s = 0; s < 3; ++s) worst = std::max(worst, std::fabs(static_cast<double>(c[s]) - ratios[s] * n));
  }
  return worst;
}

Outcome splits() {
  Outcome o;
  const std::array<double, 3> ratios{0.8, 0.1, 0.1};
  using corpus::PosLabel;
  // Part-of-speech mix of the full lexicon, missing POS as Unknown.
  const std::vector<std::pair<PosLabel, std::size_t>> mix{
      {PosLabel::kNoun, 27374},      {PosLabel::kAdjective, 18292},          {PosLabel::kVerb, 2442},
      {PosLabel::kAdverb, 1824},     {PosLabel::kProperNoun, 582},           {PosLabel::kInterjection, 281},
      {PosLabel::kNumeral, 142},     {PosLabel::kConjunctionParticle, 102},  {PosLabel::kPreposition, 86},
      {PosLabel::kPronoun, 55},      {PosLabel::kAffixParticle, 33},         {PosLabel::kPostposition, 18},
      {PosLabel::kUnknown, 69}};
  struct Named {
    std::string name;
    std::vector<corpus::LexiconRecord> recs;
  };
  std::vector<Named> corpora{{"cipher-1000", corpus::cipher_corpus(1000, 5)},
                             {"synthetic-52152", corpus::synthetic_pos_corpus(52152, mix, 9)}};
  for (const auto& c : corpora) {
    const auto a = corpus::stratified_split(c.recs, ratios, 42);
    const auto b = corpus::stratified_split(c.recs, ratios, 42);
    o.require(corpus::manifest_to_json(a).dump() == corpus::manifest_to_json(b).dump(), c.name + " manifests identical");
    const double dev = cell_deviation(a, ratios);
    o.require(dev <= 1.0, c.name + " cells within 1 (" + num(dev) + ")");
    o.note(c.name + ": sizes " + std::to_string(a.train().size()) + "/" + std::to_string(a.valid().size()) + "/" +
           std::to_string(a.test().size()) + ", max cell deviation " + num(dev));
    if (c.recs.size() == 52152)
      o.require(a.train().size() == 41722 && a.valid().size() == 5215 && a.test().size() == 5215,
                "synthetic sizes 41,722/5,215/5,215");
  }
  if (const char* p = real_corpus()) {
    tltest::TempDir d("accept-real");
    const Config cfg;
    pipeline::prepare(cfg, {p, d / "prep"});
    const auto s1 = pipeline::split(cfg, {d / "prep/cleaned.jsonl", d / "s1", 42, std::nullopt});
    pipeline::split(cfg, {d / "prep/cleaned.jsonl", d / "s2", 42, std::nullopt});
    o.require(tltest::slurp(d / "s1/split_manifest.json") == tltest::slurp(d / "s2/split_manifest.json"),
              "real corpus manifests identical");
    o.require(s1["sizes"] == Json::parse("[41722, 5215, 5215]"), "real sizes 41,722/5,215/5,215 (got " +
                                                                     s1["sizes"].dump() + ")");
    o.note("real corpus sizes " + s1["sizes"].dump());
  } else {
    o.note("real-corpus size check skipped (TL_REAL_CORPUS unset)");
  }
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome rules_baseline() {
  Outcome o;
  const Config cfg;
  const auto bundle = corpus::stratified_split(corpus::cipher_corpus(2000, 3), {0.8, 0.1, 0.1}, 42);
  const rules::RuleTransliterator rt(rules::build_trie(bundle.train()), rules::CharMap::from_config(cfg));
  std::size_t hit = 0;
  for (const auto& r : bundle.train()) hit += rt(r.tajik) == r.persian;
  o.require(hit == bundle.train().size(), "trie exact match on training keys");
  std::u32string spaced = utf8::decode(cfg.get("rules.alphabet")), letters;
  for (char32_t c : spaced)
    if (c != U' ') letters.push_back(c);
  std::u32string missing;
  const bool covers = rt.charmap().covers(letters, &missing);
  o.require(letters.size() == 35, "alphabet has 35 letters (" + std::to_string(letters.size()) + ")");
  o.require(covers, "charmap covers the alphabet (missing " + utf8::encode(missing) + ")");
  o.note("trie " + std::to_string(hit) + "/" + std::to_string(bundle.train().size()) + " keys; charmap covers " +
         std::to_string(letters.size() - missing.size()) + "/" + std::to_string(letters.size()) + " letters");

  if (const char* p = real_corpus()) {
    tltest::TempDir d("accept-mine");
    pipeline::prepare(cfg, {p, d / "prep"});
    pipeline::split(cfg, {d / "prep/cleaned.jsonl", d / "s", std::nullopt, std::nullopt});
    const auto train = corpus::read_lexicon(d / "s/train.jsonl");
    const auto mined = rules::mine_letter_map(pairs_of(train), 50);
    std::size_t agree = 0;
    for (const auto& m : mined) {
      const auto* t = rt.charmap().lookup(m.source);
      if (t && !t->empty() && (*t)[0] == m.target) ++agree;
    }
    const double share = mined.empty() ? 0.0 : static_cast<double>(agree) / mined.size();
    o.require(share >= 0.9, "mined letters agree with the charmap >= 90% (" + num(share) + ")");
    o.note("dictionary oracle: " + std::to_string(agree) + "/" + std::to_string(mined.size()) + " mined letters agree");
  } else {
    o.note("dictionary-oracle check skipped (TL_REAL_CORPUS unset)");
  }
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome training_determinism() {
  Outcome o;
  tltest::TempDir d("accept-det");
  const auto pairs = pairs_of(corpus::cipher_corpus(120, 8));
  const auto vocab = vocab::build_vocab(pairs);
  std::vector<trainer::StringPair> train(pairs.begin(), pairs.begin() + 100), valid(pairs.begin() + 100, pairs.end());
  auto run = [&](const std::string& name) {
    models::TransformerConfig mc;
    mc.layers = 1;
    mc.d_model = 16;
    mc.heads = 2;
    mc.d_ff = 32;
    mc.dropout = 0.1;
    mc.max_len = 32;
    auto model = models::make_model<float>("transformer", mc.to_json(), vocab.source.size(), vocab.target.size());
    trainer::TrainConfig tc;
    tc.max_epochs = 4;
    tc.patience = 4;
    tc.batch_size = 8;
    tc.adam.lr = 3e-3;
    tc.decode_max_len = 20;
    trainer::TrainOptions opt;
    opt.out_dir = d / name;
    return trainer::train(*model, vocab, train, valid, tc, opt).history.to_json().dump();
  };
  const auto h1 = run("a"), h2 = run("b");
  o.require(h1 == h2, "history identical");
  for (const char* f : {"best.ckpt", "last.ckpt"}) {
    const auto a = tltest::slurp(d / "a" / f), b = tltest::slurp(d / "b" / f);
    o.require(!a.empty() && a == b, std::string(f) + " identical");
  }
  o.note("4 epochs with dropout; history " + std::to_string(h1.size()) + " bytes, checkpoints " +
         std::to_string(tltest::slurp(d / "a/last.ckpt").size()) + " bytes, identical");
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome report_tables() {
  Outcome o;
  tltest::TempDir d("accept-report");
  // Only model size and epoch budget differ from a full run.
  const Config cfg = Config::from_string(
      "[transformer]\nlayers = 1\nd_model = 32\nheads = 4\nd_ff = 64\n"
      "[bilstm]\nembedding_dim = 16\nhidden_size = 16\ndecoder_hidden = 16\nattention_dim = 16\n"
      "[train]\nmax_epochs = 3\npatience = 3\nbatch_size = 32\nlr = 3e-3\n");
  pipeline::synth(cfg, {"cipher", 600, 42, d / "raw.jsonl"});
  pipeline::prepare(cfg, {d / "raw.jsonl", d / "prep"});
  const auto sp = pipeline::split(cfg, {d / "prep/cleaned.jsonl", d / "splits", std::nullopt, std::nullopt});
  pipeline::train(cfg, {"bilstm", d / "splits", d / "bilstm", std::nullopt, std::nullopt});
  pipeline::train(cfg, {"transformer", d / "splits", d / "transformer", std::nullopt, std::nullopt});
  pipeline::EvaluateRequest eq;
  eq.test = d / "splits/test.jsonl";
  eq.systems = {{pipeline::System::kRules, d / "splits/train.jsonl"},
                {pipeline::System::kModel, d / "bilstm/best.ckpt"},
                {pipeline::System::kModel, d / "transformer/best.ckpt"}};
  eq.decode = "both";
  eq.beam = 3;
  eq.max_len = 40;
  eq.beam_sweep = {1, 3, 5, 10};
  eq.warmup = 5;
  eq.out_dir = d / "eval";
  pipeline::evaluate(cfg, eq);
  const std::size_t n_test = sp["sizes"][2].get<std::size_t>();

  using V = std::vector<std::string>;
  const auto models = tltest::parse_table(tltest::slurp(d / "eval/table_models.txt"));
  o.require(models.well_formed, "models table parses");
  o.require(models.header == V{"Model", "CER (↓)", "Acc. (↑)", "Time"}, "models header");
  V labels;
  for (const auto& r : models.rows) {
    labels.push_back(r[0]);
    o.require(tltest::metric_cell(r[1]) && tltest::metric_cell(r[2]) && tltest::time_cell(r[3]), "models row " + r[0]);
  }
  o.require(labels.size() == 5 && labels[0] == "Rule-based (dict.)" && labels[1] == "BiLSTM (16)" &&
                labels[3] == "Transf. (greedy)" && labels[4] == "Transf. (beam 3)",
            "models rows");

  const auto beam = tltest::parse_table(tltest::slurp(d / "eval/table_beam.txt"));
  o.require(beam.well_formed, "beam table parses");
  o.require(beam.header == V{"Beam", "CER", "Acc.", "Hyps", "Time"}, "beam header");
  const V beams{"1 (greedy)", "3", "5", "10"}, hyps{"1", "3", "5", "10"};
  o.require(beam.rows.size() == 4, "beam rows");
  for (std::size_t i = 0; i < beam.rows.size() && i < 4; ++i) {
    const auto& r = beam.rows[i];
    o.require(r[0] == beams[i] && r[3] == hyps[i] && tltest::metric_cell(r[1]) && tltest::metric_cell(r[2]) &&
                  tltest::time_cell(r[4]),
              "beam row " + r[0]);
  }

  const auto pos = tltest::parse_table(tltest::slurp(d / "eval/table_pos.txt"));
  o.require(pos.well_formed, "POS table parses");
  o.require(pos.header == V{"POS", "N", "CER (↓)", "Acc. (↑)"}, "POS header");
  std::size_t strata = 0, all = 0;
  V names;
  for (const auto& r : pos.rows) {
    names.push_back(r[0]);
    o.require(tltest::count_cell(r[1]) && tltest::metric_cell(r[2]) && tltest::metric_cell(r[3]), "POS row " + r[0]);
    if (r[0] == "All")
      all = tltest::parse_count(r[1]);
    else
      strata += tltest::parse_count(r[1]);
  }
  o.require(names.size() >= 5 && names[0] == "Noun" && names[1] == "Adjective" && names[2] == "Verb" &&
                names[3] == "Adverb" && names.back() == "All",
            "POS rows");
  o.require(!pos.rules_before.empty() && pos.rules_before.back() == pos.rows.size() - 1, "rule above All");
  o.require(strata == all, "strata sum to All");
  o.require(all == n_test, "All equals test size");
  o.require(std::filesystem::exists(d / "eval/report.json") && std::filesystem::exists(d / "eval/tables.txt"),
            "report.json and tables.txt written");
  o.note("models " + std::to_string(models.rows.size()) + " rows, beam " + std::to_string(beam.rows.size()) +
         " rows, POS strata " + std::to_string(strata) + " = All " + std::to_string(all) + " = test " +
         std::to_string(n_test));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient checks", gradients},        {2, "metric oracles", metrics},
      {3, "decoding equivalence", decoding},    {4, "overfit", overfitting},
      {5, "early stopping", early_stopping},    {6, "split determinism and fidelity", splits},
      {7, "rule baseline", rules_baseline},     {8, "training determinism", training_determinism},
      {9, "report tables", report_tables},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s  criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
