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

#include "pipeline/pipeline.hpp"

#include <chrono>
#include <map>
#include <sstream>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "common/hash.hpp"
#include "corpus/corpus.hpp"
#include "corpus/split.hpp"
#include "corpus/stats.hpp"
#include "corpus/synthetic.hpp"
#include "decoder/decoder.hpp"
#include "evaluation/report.hpp"
#include "models/model.hpp"
#include "rules/rules.hpp"
#include "textnorm/textnorm.hpp"
#include "trainer/trainer.hpp"
#include "vocab/vocab.hpp"

namespace translit::pipeline {
namespace {

using Clock = std::chrono::steady_clock;
using corpus::LexiconRecord;

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<std::pair<std::string, std::string>> pairs_of(const std::vector<LexiconRecord>& recs) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.emplace_back(r.tajik, r.persian);
  return out;
}

std::vector<std::string> read_lines(const Path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string canonical_arch(const std::string& arch) {
  if (arch == "transformer" || arch == models::kTransformerArch) return "transformer";
  if (arch == "bilstm" || arch == models::kBiLstmArch) return "bilstm";
  fail(ErrorKind::kConfig, "unknown architecture '" + arch + "' (expected transformer or bilstm)");
}

std::string fmt_score(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

rules::RuleTransliterator make_rules(const Config& config, const Path& lexicon) {
  const auto recs = corpus::read_lexicon(lexicon, corpus::PosHarmonizer::from_config(config));
  rules::RuleOptions opt;
  opt.boundary_aware = config.get_bool("rules.boundary_aware");
  return {rules::build_trie(recs), rules::CharMap::from_config(config), opt};
}

struct Decoded {
  std::string text;
  double score = 0;
  bool truncated = false;
  std::vector<std::pair<std::string, double>> nbest;
};

decoder::DecodeConfig to_decode_config(const std::string& mode, std::size_t beam, double alpha, std::size_t max_len) {
  decoder::DecodeConfig dc;
  dc.beam = mode == "greedy" ? 1 : beam;
  dc.alpha = alpha;
  dc.max_len = max_len;
  dc.validate();
  return dc;
}

std::vector<Decoded> decode_batch(const models::ModelBundle& b, const std::vector<std::string>& sources,
                                  const std::string& mode, const decoder::DecodeConfig& dc) {
  std::vector<models::Ids> src;
  for (const auto& s : sources) src.push_back(b.source.encode(s));
  auto scorer = b.model->scorer(std::move(src));
  const auto results = mode == "greedy" ? decoder::greedy_decode(*scorer, dc) : decoder::beam_decode(*scorer, dc);
  std::vector<Decoded> out;
  for (const auto& r : results) {
    Decoded d;
    d.text = b.target.decode(r.best.tokens);
    d.score = r.best.score;
    d.truncated = r.truncated();
    for (const auto& h : r.nbest) d.nbest.emplace_back(b.target.decode(h.tokens), h.score);
    out.push_back(std::move(d));
  }
  return out;
}

std::array<double, 3> config_ratios(const Config& config) {
  const auto v = config.get_doubles("split.ratios");
  if (v.size() != 3) fail(ErrorKind::kConfig, "split.ratios needs three values");
  return {v[0], v[1], v[2]};
}

Json decode_json(const std::string& mode, const decoder::DecodeConfig& dc) {
  return {{"mode", mode},
          {"beam", dc.beam},
          {"alpha", dc.alpha},
          {"max_len", dc.max_len},
          {"length_normalization", "logp / length^alpha, length counts EOS and excludes SOS"}};
}

}  // namespace

RunManifest::RunManifest(std::string command, const Config& config)
    : command_(std::move(command)), config_hash_(config.hash()), started_(utc_timestamp()) {
  config_ = Json::object();
  for (const auto& [k, v] : config.entries()) config_[k] = v;
}

void RunManifest::input(const Path& path) {
  inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::output(const Path& path) {
  outputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

Json RunManifest::to_json() const {
  Json j = Json::object();
  j["command"] = command_;
  j["toolkit_version"] = TRANSLIT_VERSION;
  j["config_hash"] = config_hash_;
  j["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
  j["started"] = started_;
  j["finished"] = finished_.empty() ? Json(nullptr) : Json(finished_);
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  for (const auto& [k, v] : extra_.items()) j[k] = v;
  j["config"] = config_;
  return j;
}

void RunManifest::write(const Path& path) {
  finished_ = utc_timestamp();
  write_file_atomic(path, dump(to_json()));
}

Json prepare(const Config& config, const PrepareRequest& req, const Logger& log) {
  RunManifest manifest("prepare", config);
  const auto raw = corpus::load_jsonl(req.input);
  manifest.input(req.input);
  const textnorm::Normalizer norm(config);
  const auto pos = corpus::PosHarmonizer::from_config(config);
  corpus::CleanOptions opt;
  const auto max_len = config.get_int("corpus.max_length");
  if (max_len <= 0) fail(ErrorKind::kConfig, "corpus.max_length must be positive");
  opt.max_length = static_cast<std::size_t>(max_len);
  auto cleaned = corpus::clean(raw, norm, pos, opt);
  const std::size_t quarantined = cleaned.quarantined.size();
  auto deduped = corpus::dedup(std::move(cleaned.kept));

  ensure_directory(req.out_dir);
  const Path cleaned_path = req.out_dir / "cleaned.jsonl";
  const Path quarantine_path = req.out_dir / "quarantine.jsonl";
  const Path stats_path = req.out_dir / "stats.json";
  const Path table_path = req.out_dir / "pos_table.txt";
  write_file_atomic(cleaned_path, corpus::to_jsonl(deduped.records));
  std::string q;
  std::map<std::string, std::size_t> reasons;
  for (const auto& item : cleaned.quarantined) {
    q += corpus::quarantine_to_json(item).dump() + "\n";
    ++reasons[item.reason];
  }
  write_file_atomic(quarantine_path, q);
  const auto stats = corpus::corpus_stats(deduped.records, nullptr);
  Json stats_json = corpus::stats_to_json(stats, false);
  write_file_atomic(stats_path, dump(stats_json));
  write_file_atomic(table_path, corpus::render_pos_table(stats));

  Json summary = Json::object();
  summary["records_read"] = raw.size();
  summary["kept"] = deduped.records.size();
  summary["quarantined"] = quarantined;
  summary["quarantine_reasons"] = reasons;
  summary["duplicates_removed"] = deduped.removed;
  summary["unique_tajik"] = stats.unique_tajik;
  summary["unique_persian"] = stats.unique_persian;
  for (const auto& p : {cleaned_path, quarantine_path, stats_path, table_path}) manifest.output(p);
  manifest.set("summary", summary);
  manifest.write(req.out_dir / "manifest.json");
  say(log, "prepare: kept " + std::to_string(deduped.records.size()) + ", quarantined " +
               std::to_string(quarantined) + ", duplicates " + std::to_string(deduped.removed));
  return summary;
}

Json split(const Config& config, const SplitRequest& req, const Logger& log) {
  RunManifest manifest("split", config);
  const auto records = corpus::read_lexicon(req.input, corpus::PosHarmonizer::from_config(config));
  manifest.input(req.input);
  const std::uint64_t seed = req.seed ? *req.seed : static_cast<std::uint64_t>(config.get_int("split.seed"));
  const auto ratios = req.ratios ? *req.ratios : config_ratios(config);
  manifest.seed(seed);
  const auto bundle = corpus::stratified_split(records, ratios, seed);

  ensure_directory(req.out_dir);
  std::vector<Path> outputs;
  for (int s = 0; s < 3; ++s) {
    const Path p = req.out_dir / (std::string(corpus::kSplitNames[s]) + ".jsonl");
    write_file_atomic(p, corpus::to_jsonl(bundle.splits[s]));
    outputs.push_back(p);
  }
  const Path mpath = req.out_dir / "split_manifest.json";
  write_file_atomic(mpath, dump(corpus::manifest_to_json(bundle)));
  const auto stats = corpus::corpus_stats(records, &bundle);
  const Path spath = req.out_dir / "stats.json";
  write_file_atomic(spath, dump(corpus::stats_to_json(stats, true)));
  const Path tpath = req.out_dir / "tables.txt";
  write_file_atomic(tpath, corpus::render_split_table(stats) + "\n" + corpus::render_pos_table(stats));
  outputs.insert(outputs.end(), {mpath, spath, tpath});
  for (const auto& p : outputs) manifest.output(p);

  Json summary = Json::object();
  summary["seed"] = seed;
  summary["method"] = bundle.method;
  summary["sizes"] = {bundle.train().size(), bundle.valid().size(), bundle.test().size()};
  manifest.set("summary", summary);
  manifest.write(req.out_dir / "manifest.json");
  say(log, "split: " + std::to_string(bundle.train().size()) + " / " + std::to_string(bundle.valid().size()) + " / " +
               std::to_string(bundle.test().size()) + " (" + bundle.method + ")");
  return summary;
}

Json train(const Config& config, const TrainRequest& req, const Logger& log) {
  const std::string arch = canonical_arch(req.arch);
  RunManifest manifest("train", config);
  const auto harm = corpus::PosHarmonizer::from_config(config);
  const Path train_path = req.splits_dir / "train.jsonl";
  const Path valid_path = req.splits_dir / "valid.jsonl";
  const auto train_recs = corpus::read_lexicon(train_path, harm);
  const auto valid_recs = corpus::read_lexicon(valid_path, harm);
  manifest.input(train_path);
  manifest.input(valid_path);
  const Path split_manifest = req.splits_dir / "split_manifest.json";
  std::string data_hash;
  if (std::filesystem::exists(split_manifest)) {
    manifest.input(split_manifest);
    data_hash = sha256_file(split_manifest);
  } else {
    data_hash = sha256_hex(sha256_file(train_path) + sha256_file(valid_path));
  }

  const auto train_pairs = pairs_of(train_recs);
  const auto valid_pairs = pairs_of(valid_recs);
  const auto vocab = vocab::build_vocab(train_pairs);
  const Json model_cfg = arch == "transformer" ? models::TransformerConfig::from_config(config).to_json()
                                               : models::BiLstmConfig::from_config(config).to_json();
  auto model = models::make_model<float>(arch, model_cfg, static_cast<std::size_t>(vocab.source.size()),
                                         static_cast<std::size_t>(vocab.target.size()));
  auto tc = trainer::TrainConfig::from_config(config);
  if (req.seed) tc.seed = *req.seed;
  tc.validate();
  manifest.seed(tc.seed);

  trainer::TrainOptions opt;
  opt.out_dir = req.out_dir;
  opt.resume = req.resume;
  opt.metadata = {{"config_hash", config.hash()},
                  {"data_manifest_hash", data_hash},
                  {"toolkit_version", TRANSLIT_VERSION},
                  {"arch", model->arch()},
                  {"parameters", model->params().count()},
                  {"source_vocab", vocab.source.size()},
                  {"target_vocab", vocab.target.size()}};
  opt.on_epoch = [&](const trainer::EpochRecord& r) {
    say(log, "epoch " + std::to_string(r.epoch) + ": train_loss " + fmt_score(r.train_loss) + " valid_loss " +
                 fmt_score(r.valid_loss) + " valid_cer " + fmt_score(r.valid_cer) + " valid_exact " +
                 fmt_score(r.valid_exact) + (r.improved ? " *" : ""));
  };
  if (req.resume) manifest.input(*req.resume);
  say(log, std::string("train: ") + model->arch() + ", " + std::to_string(model->params().count()) + " parameters, " +
               std::to_string(train_pairs.size()) + " training pairs");
  ensure_directory(req.out_dir);
  const auto result = trainer::train(*model, vocab, train_pairs, valid_pairs, tc, opt);

  const Path best_path = req.out_dir / "best.ckpt";
  result.best.save(best_path);
  const Path hist_path = req.out_dir / "history.json";
  Json hist = result.history.to_json();
  hist["train_config"] = tc.to_json();
  hist["metadata"] = opt.metadata;
  write_file_atomic(hist_path, dump(hist));
  const Path timing_path = req.out_dir / "timing.json";
  write_file_atomic(timing_path, dump(result.history.timing_json()));
  for (const auto& p : {best_path, req.out_dir / "last.ckpt", hist_path, timing_path})
    if (std::filesystem::exists(p)) manifest.output(p);

  Json summary = Json::object();
  summary["arch"] = model->arch();
  summary["epochs"] = result.history.epochs.size();
  summary["best_epoch"] = result.history.best_epoch;
  summary["best_valid_cer"] = result.history.best_cer;
  summary["stop_reason"] = result.history.stop_reason;
  summary["metadata"] = opt.metadata;
  manifest.set("summary", summary);
  manifest.write(req.out_dir / "manifest.json");
  say(log, "train: stopped (" + result.history.stop_reason + ") after " +
               std::to_string(result.history.epochs.size()) + " epochs; best epoch " +
               std::to_string(result.history.best_epoch) + ", valid CER " + fmt_score(result.history.best_cer));
  return summary;
}

DecodeSettings decode_settings(const Config& config) {
  DecodeSettings d;
  const auto beam = config.get_int("decode.beam");
  const auto max_len = config.get_int("decode.max_len");
  if (beam <= 0) fail(ErrorKind::kConfig, "decode.beam must be positive");
  if (max_len <= 0) fail(ErrorKind::kConfig, "decode.max_len must be positive");
  d.beam = static_cast<std::size_t>(beam);
  d.alpha = config.get_double("decode.alpha");
  d.max_len = static_cast<std::size_t>(max_len);
  return d;
}

Json translit(const Config& config, const TranslitRequest& req, const Logger& log) {
  RunManifest manifest("translit", config);
  const textnorm::Normalizer norm(config);
  const auto lines = read_lines(req.in);
  manifest.input(req.in);
  std::vector<std::string> sources;
  for (const auto& l : lines) sources.push_back(norm.normalize(l));
  std::string out;
  Json summary = Json::object();
  summary["inputs"] = lines.size();
  if (req.rules) {
    if (!req.lexicon) fail(ErrorKind::kConfig, "rule mode needs a lexicon");
    manifest.input(*req.lexicon);
    const auto rt = make_rules(config, *req.lexicon);
    for (std::size_t i = 0; i < lines.size(); ++i) out += lines[i] + "\t" + rt(sources[i]) + "\t\n";
    summary["mode"] = "rules";
  } else {
    if (!req.model) fail(ErrorKind::kConfig, "translit needs --model or --rules");
    if (req.decode.mode != "greedy" && req.decode.mode != "beam")
      fail(ErrorKind::kConfig, "decode mode must be greedy or beam");
    if (req.decode.nbest == 0) fail(ErrorKind::kConfig, "nbest must be at least 1");
    manifest.input(*req.model);
    const auto bundle = models::load_model(*req.model);
    const auto dc = to_decode_config(req.decode.mode, req.decode.beam, req.decode.alpha, req.decode.max_len);
    std::size_t truncated = 0;
    constexpr std::size_t kChunk = 256;
    for (std::size_t start = 0; start < sources.size(); start += kChunk) {
      const std::size_t end = std::min(sources.size(), start + kChunk);
      std::vector<std::string> chunk(sources.begin() + static_cast<std::ptrdiff_t>(start),
                                     sources.begin() + static_cast<std::ptrdiff_t>(end));
      const auto decoded = decode_batch(bundle, chunk, req.decode.mode, dc);
      for (std::size_t i = 0; i < decoded.size(); ++i) {
        const auto& d = decoded[i];
        truncated += d.truncated ? 1 : 0;
        const std::size_t rows = std::min(req.decode.nbest, d.nbest.size());
        for (std::size_t r = 0; r < rows; ++r)
          out += lines[start + i] + "\t" + d.nbest[r].first + "\t" + fmt_score(d.nbest[r].second) + "\n";
      }
    }
    summary["mode"] = "model";
    summary["decode"] = decode_json(req.decode.mode, dc);
    summary["nbest"] = req.decode.nbest;
    summary["truncated"] = truncated;
  }
  if (req.out.has_parent_path()) ensure_directory(req.out.parent_path());
  write_file_atomic(req.out, out);
  manifest.output(req.out);
  manifest.set("summary", summary);
  manifest.write(Path(req.out.string() + ".manifest.json"));
  say(log, "translit: wrote " + std::to_string(lines.size()) + " inputs to " + req.out.string());
  return summary;
}

Json evaluate(const Config& config, const EvaluateRequest& req, const Logger& log) {
  if (req.systems.empty()) fail(ErrorKind::kConfig, "evaluate needs --pred, --model, or --rules");
  if (req.decode != "greedy" && req.decode != "beam" && req.decode != "both")
    fail(ErrorKind::kConfig, "evaluate decode mode must be greedy, beam, or both");
  RunManifest manifest("evaluate", config);
  const auto test = corpus::read_lexicon(req.test, corpus::PosHarmonizer::from_config(config));
  manifest.input(req.test);
  if (test.empty()) fail(ErrorKind::kInvalidArgument, "test file has no records: " + req.test.string());
  const textnorm::Normalizer norm(config);
  auto prep = [&](const std::string& s) {
    return req.strip_diacritics ? textnorm::strip_diacritics(s, norm.diacritics()) : s;
  };
  auto item_for = [&](std::size_t i, const std::string& pred) {
    auto it = evaluation::make_item(test[i].tajik, prep(test[i].persian), prep(pred), test[i].pos);
    it.prediction = pred;
    return it;
  };

  struct Row {
    std::string label;
    Json system;
    evaluation::EvalReport report;
  };
  std::vector<Row> rows;
  std::optional<models::ModelBundle> first_model;
  Json first_model_meta;
  bool sweep_on_transformer = false;

  auto run_model = [&](const models::ModelBundle& b, const std::string& mode, std::size_t beam, Json meta) {
    const auto dc = to_decode_config(mode, beam, req.alpha, req.max_len);
    std::vector<evaluation::EvalItem> items;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto t0 = Clock::now();
      const auto d = decode_batch(b, {test[i].tajik}, mode, dc).front();
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      auto it = item_for(i, d.text);
      it.score = d.score;
      it.truncated = d.truncated;
      it.decode_ms = ms;
      items.push_back(std::move(it));
    }
    meta["decode"] = decode_json(mode, dc);
    meta["timing"] = "per-word decode wall clock, monotonic, model load excluded";
    return evaluation::summarize(std::move(items), req.warmup, meta);
  };

  for (const auto& sys : req.systems) {
    manifest.input(sys.path);
    Json meta = {{"path", sys.path.string()}, {"sha256", sha256_file(sys.path)}};
    if (sys.kind == System::kPredictions) {
      const auto lines = read_lines(sys.path);
      std::vector<std::string> preds;
      for (const auto& l : lines) {
        if (l.empty()) continue;
        const auto tab = l.find('\t');
        if (tab == std::string::npos) fail(ErrorKind::kParse, "prediction row without a tab in " + sys.path.string());
        const auto tab2 = l.find('\t', tab + 1);
        preds.push_back(l.substr(tab + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab - 1));
        const std::string src = l.substr(0, tab);
        const std::size_t i = preds.size() - 1;
        if (i < test.size() && norm.normalize(src) != test[i].tajik)
          fail(ErrorKind::kInvalidArgument, "prediction row " + std::to_string(i + 1) + " source does not match the test item");
      }
      if (preds.size() != test.size())
        fail(ErrorKind::kInvalidArgument, "prediction file has " + std::to_string(preds.size()) + " rows, test set has " +
                                              std::to_string(test.size()));
      std::vector<evaluation::EvalItem> items;
      for (std::size_t i = 0; i < test.size(); ++i) items.push_back(item_for(i, preds[i]));
      meta["kind"] = "predictions";
      rows.push_back({"Predictions (" + sys.path.filename().string() + ")", meta,
                      evaluation::summarize(std::move(items), req.warmup, meta)});
    } else if (sys.kind == System::kRules) {
      const auto rt = make_rules(config, sys.path);
      std::vector<evaluation::EvalItem> items;
      for (std::size_t i = 0; i < test.size(); ++i) {
        const auto t0 = Clock::now();
        std::string pred = rt(test[i].tajik);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        auto it = item_for(i, pred);
        it.decode_ms = ms;
        items.push_back(std::move(it));
      }
      meta["kind"] = "rules";
      rows.push_back({evaluation::model_label("rules", {}, "greedy", 1), meta,
                      evaluation::summarize(std::move(items), req.warmup, meta)});
    } else {
      auto bundle = models::load_model(sys.path);
      meta["kind"] = "model";
      meta["arch"] = bundle.model->arch();
      const Json cfg = bundle.model->config_json();
      std::vector<std::pair<std::string, std::size_t>> modes;
      if (req.decode == "greedy" || req.decode == "both") modes.emplace_back("greedy", 1);
      if (req.decode == "beam" || req.decode == "both") modes.emplace_back("beam", req.beam);
      for (const auto& [mode, beam] : modes) {
        say(log, "evaluate: " + sys.path.string() + " (" + mode + ")");
        rows.push_back({evaluation::model_label(bundle.model->arch(), cfg, mode, beam), meta,
                        run_model(bundle, mode, beam, meta)});
      }
      const bool transformer = std::string(bundle.model->arch()) == models::kTransformerArch;
      if (!first_model || (transformer && !sweep_on_transformer)) {
        sweep_on_transformer = transformer;
        first_model = std::move(bundle);
        first_model_meta = meta;
      }
    }
  }

  ensure_directory(req.out_dir);
  std::vector<Path> outputs;
  Json report = Json::object();
  report["test"] = {{"path", req.test.string()}, {"n", test.size()}};
  report["strip_diacritics"] = req.strip_diacritics;
  report["systems"] = Json::array();
  std::vector<evaluation::ModelRow> table3;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    Json sj = Json::object();
    sj["label"] = r.label;
    sj["report"] = evaluation::report_to_json(r.report, true);
    report["systems"].push_back(std::move(sj));
    table3.push_back({r.label, r.report.cer, r.report.accuracy, r.report.ms_per_word});
    const Path pp = req.out_dir / ("predictions_" + std::to_string(i + 1) + ".tsv");
    write_file_atomic(pp, evaluation::predictions_tsv(r.report.items));
    outputs.push_back(pp);
  }

  // POS breakdown of the primary system: the first Transformer greedy row,
  // else the first row.
  std::size_t primary = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label == "Transf. (greedy)") {
      primary = i;
      break;
    }
  }
  const Path t3 = req.out_dir / "table_models.txt";
  const Path t5 = req.out_dir / "table_pos.txt";
  write_file_atomic(t3, evaluation::render_model_table(table3));
  write_file_atomic(t5, evaluation::render_pos_table(rows[primary].report));
  outputs.insert(outputs.end(), {t3, t5});
  report["primary_system"] = rows[primary].label;

  std::string tables = evaluation::render_model_table(table3) + "\n";
  if (!req.beam_sweep.empty()) {
    if (!first_model) fail(ErrorKind::kConfig, "a beam sweep needs a model system");
    std::vector<evaluation::BeamRow> sweep;
    Json sj = Json::array();
    for (auto k : req.beam_sweep) {
      say(log, "evaluate: beam sweep k=" + std::to_string(k));
      const auto r = run_model(*first_model, k == 1 ? "greedy" : "beam", k, first_model_meta);
      sweep.push_back({k, r.cer, r.accuracy, k, r.ms_per_word});
      Json e = evaluation::report_to_json(r, false);
      e["beam"] = k;
      sj.push_back(std::move(e));
    }
    report["beam_sweep"] = std::move(sj);
    const Path t4 = req.out_dir / "table_beam.txt";
    write_file_atomic(t4, evaluation::render_beam_table(sweep));
    outputs.push_back(t4);
    tables += evaluation::render_beam_table(sweep) + "\n";
  }
  tables += evaluation::render_pos_table(rows[primary].report);
  const Path all_tables = req.out_dir / "tables.txt";
  write_file_atomic(all_tables, tables);
  const Path rpath = req.out_dir / "report.json";
  write_file_atomic(rpath, dump(report));
  outputs.insert(outputs.end(), {all_tables, rpath});
  for (const auto& p : outputs) manifest.output(p);

  Json summary = Json::object();
  summary["systems"] = Json::array();
  for (const auto& r : rows) {
    summary["systems"].push_back({{"label", r.label},
                                  {"cer", r.report.cer},
                                  {"accuracy", r.report.accuracy},
                                  {"chrf_pp", r.report.chrf},
                                  {"ms_per_word", r.report.ms_per_word ? Json(*r.report.ms_per_word) : Json(nullptr)}});
  }
  summary["tables"] = tables;
  manifest.set("summary", summary);
  manifest.write(req.out_dir / "manifest.json");
  say(log, tables);
  return summary;
}

Json synth(const Config& config, const SynthRequest& req, const Logger& log) {
  if (req.kind != "cipher") fail(ErrorKind::kConfig, "unknown synthetic corpus kind '" + req.kind + "'");
  RunManifest manifest("synth", config);
  manifest.seed(req.seed);
  const auto recs = corpus::cipher_corpus(req.count, req.seed);
  if (req.out.has_parent_path()) ensure_directory(req.out.parent_path());
  write_file_atomic(req.out, corpus::to_jsonl(recs));
  manifest.output(req.out);
  Json summary = {{"kind", req.kind}, {"count", recs.size()}, {"seed", req.seed}};
  manifest.set("summary", summary);
  manifest.write(Path(req.out.string() + ".manifest.json"));
  say(log, "synth: wrote " + std::to_string(recs.size()) + " records to " + req.out.string());
  return summary;
}

}  // namespace translit::pipeline
