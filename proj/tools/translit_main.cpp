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

// Command-line front end. Talks to the toolkit only through the C API.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "translit/translit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code(tl_status s) {
  switch (s) {
    case TL_OK: return kExitOk;
    case TL_ERR_CONFIG:
    case TL_ERR_NOT_FOUND:
    case TL_ERR_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitRuntime;
  }
}

int report(tl_status s) {
  if (s != TL_OK) std::fprintf(stderr, "translit: error (%s): %s\n", tl_status_name(s), tl_last_error());
  return exit_code(s);
}

void log_line(const char* message, void*) { std::fprintf(stderr, "%s\n", message); }

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  bool json = false;
  bool quiet = false;
};

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character-level Tajik-to-Persian transliteration toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tl_version()));
  Options g;
  app.add_option("-c,--config", g.config, "INI configuration file")->envname("TRANSLIT_CONFIG");
  app.add_option("--set", g.overrides, "Override a configuration key (section.key=value)");
  app.add_flag("--json", g.json, "Print the machine-readable command summary on stdout");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

  std::string input, out, splits, arch, resume, model, lexicon, test, in_file, decode, kind = "cipher";
  std::string ratios, sweep;
  std::vector<std::string> models_list, preds;
  std::uint64_t seed = 0;
  std::size_t beam = 0, max_len = 0, nbest = 1, count = 200, warmup = 0;
  double alpha = 0;
  bool rules = false, strip = false;

  auto* prepare = app.add_subcommand("prepare", "Clean, normalise, and deduplicate a raw JSONL corpus");
  prepare->add_option("--input", input, "Raw JSONL corpus")->required();
  prepare->add_option("--out", out, "Output directory")->required();

  auto* split = app.add_subcommand("split", "Stratified train/valid/test split of a cleaned corpus");
  split->add_option("--input", input, "cleaned.jsonl")->required();
  split->add_option("--seed", seed, "Split seed (default split.seed)");
  split->add_option("--ratios", ratios, "Three comma-separated ratios (default split.ratios)");
  split->add_option("--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a sequence-to-sequence model");
  train->add_option("--arch", arch, "Architecture")->required()->check(CLI::IsMember({"transformer", "bilstm"}));
  train->add_option("--splits", splits, "Directory holding train.jsonl and valid.jsonl")->required();
  train->add_option("--out", out, "Run directory")->required();
  train->add_option("--resume", resume, "Continue from a last.ckpt");
  train->add_option("--seed", seed, "Run seed (default train.seed)");

  auto* tr = app.add_subcommand("translit", "Transliterate one word per line");
  tr->add_option("--model", model, "Model checkpoint");
  tr->add_flag("--rules", rules, "Use the dictionary trie baseline");
  tr->add_option("--lexicon", lexicon, "Lexicon JSONL for --rules");
  tr->add_option("--decode", decode, "Decoding mode")->check(CLI::IsMember({"greedy", "beam"}));
  tr->add_option("--beam", beam, "Beam size (default decode.beam)")->check(CLI::PositiveNumber);
  tr->add_option("--alpha", alpha, "Length-normalisation exponent (default decode.alpha)");
  tr->add_option("--max-len", max_len, "Maximum output length (default decode.max_len)")->check(CLI::PositiveNumber);
  tr->add_option("--nbest", nbest, "Ranked rows per input")->check(CLI::PositiveNumber);
  tr->add_option("--in", in_file, "Input text file")->required();
  tr->add_option("--out", out, "Output TSV")->required();

  auto* ev = app.add_subcommand("evaluate", "Score systems on a test split and emit report tables");
  ev->add_option("--test", test, "Test split JSONL")->required();
  ev->add_option("--pred", preds, "Predictions TSV (repeatable)");
  ev->add_option("--model", models_list, "Model checkpoint (repeatable)");
  ev->add_flag("--rules", rules, "Include the dictionary trie baseline");
  ev->add_option("--lexicon", lexicon, "Lexicon JSONL for --rules");
  ev->add_option("--decode", decode, "Model decoding")->check(CLI::IsMember({"greedy", "beam", "both"}));
  ev->add_option("--beam", beam, "Beam size for beam rows (default decode.beam)")->check(CLI::PositiveNumber);
  ev->add_option("--alpha", alpha, "Length-normalisation exponent (default decode.alpha)");
  ev->add_option("--max-len", max_len, "Maximum output length (default decode.max_len)")->check(CLI::PositiveNumber);
  ev->add_option("--beam-sweep", sweep, "Comma-separated beam sizes for the beam table, e.g. 1,3,5,10");
  ev->add_option("--warmup", warmup, "Timed items excluded from ms/word (default eval.warmup)");
  ev->add_flag("--strip-diacritics", strip, "Strip diacritics before scoring");
  ev->add_option("--out", out, "Report directory")->required();

  auto* sy = app.add_subcommand("synth", "Write a synthetic cipher corpus");
  sy->add_option("--kind", kind, "Corpus kind")->check(CLI::IsMember({"cipher"}));
  sy->add_option("--count", count, "Number of records")->check(CLI::PositiveNumber);
  sy->add_option("--seed", seed, "Generator seed")->default_val(42);
  sy->add_option("--out", out, "Output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  tl_context* ctx = nullptr;
  if (int rc = report(tl_context_new(g.config.empty() ? nullptr : g.config.c_str(), &ctx)); rc != kExitOk) return rc;
  struct Free {
    tl_context* c;
    ~Free() { tl_context_free(c); }
  } free_ctx{ctx};
  if (!g.quiet) tl_context_set_logger(ctx, log_line, nullptr);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "translit: --set expects section.key=value, got '%s'\n", kv.c_str());
      return kExitUsage;
    }
    if (int rc = report(tl_context_set(ctx, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())); rc != kExitOk)
      return rc;
  }

  tl_status st = TL_OK;
  if (prepare->parsed()) {
    st = tl_prepare(ctx, input.c_str(), out.c_str());
  } else if (split->parsed()) {
    tl_split_options o{};
    if (split->count("--seed")) {
      o.has_seed = 1;
      o.seed = seed;
    }
    if (split->count("--ratios")) {
      std::vector<double> r;
      try {
        r = parse_ratios(ratios);
      } catch (const std::exception&) {
        r.clear();
      }
      if (r.size() != 3) {
        std::fprintf(stderr, "translit: --ratios expects three comma-separated numbers\n");
        return kExitUsage;
      }
      o.has_ratios = 1;
      for (int i = 0; i < 3; ++i) o.ratios[i] = r[i];
    }
    st = tl_split(ctx, input.c_str(), out.c_str(), &o);
  } else if (train->parsed()) {
    st = tl_train(ctx, arch.c_str(), splits.c_str(), out.c_str(), resume.empty() ? nullptr : resume.c_str(),
                  train->count("--seed") ? &seed : nullptr);
  } else if (tr->parsed()) {
    if (rules == !model.empty()) {
      std::fprintf(stderr, "translit: give exactly one of --model or --rules\n");
      return kExitUsage;
    }
    if (rules && lexicon.empty()) {
      std::fprintf(stderr, "translit: --rules needs --lexicon\n");
      return kExitUsage;
    }
    tl_decode_options o{};
    if (int rc = report(tl_decode_options_init(ctx, &o)); rc != kExitOk) return rc;
    if (!decode.empty()) o.mode = decode.c_str();
    if (tr->count("--beam")) o.beam = beam;
    if (tr->count("--alpha")) o.alpha = alpha;
    if (tr->count("--max-len")) o.max_len = max_len;
    o.nbest = nbest;
    st = tl_translit_file(ctx, rules ? nullptr : model.c_str(), rules ? lexicon.c_str() : nullptr, &o,
                          in_file.c_str(), out.c_str());
  } else if (ev->parsed()) {
    if (rules && lexicon.empty()) {
      std::fprintf(stderr, "translit: --rules needs --lexicon\n");
      return kExitUsage;
    }
    std::vector<tl_system> systems;
    if (rules) systems.push_back({TL_SYSTEM_RULES, lexicon.c_str()});
    for (const auto& m : models_list) systems.push_back({TL_SYSTEM_MODEL, m.c_str()});
    for (const auto& p : preds) systems.push_back({TL_SYSTEM_PREDICTIONS, p.c_str()});
    if (systems.empty()) {
      std::fprintf(stderr, "translit: evaluate needs --pred, --model, or --rules\n");
      return kExitUsage;
    }
    std::vector<std::size_t> ks;
    if (!sweep.empty()) {
      std::stringstream ss(sweep);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          const long v = std::stol(part);
          if (v <= 0) throw std::invalid_argument("beam");
          ks.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
          std::fprintf(stderr, "translit: --beam-sweep expects positive integers, got '%s'\n", part.c_str());
          return kExitUsage;
        }
      }
    }
    tl_evaluate_options o{};
    if (int rc = report(tl_evaluate_options_init(ctx, &o)); rc != kExitOk) return rc;
    o.test = test.c_str();
    o.systems = systems.data();
    o.num_systems = systems.size();
    if (!decode.empty()) o.decode = decode.c_str();
    if (ev->count("--beam")) o.beam = beam;
    if (ev->count("--alpha")) o.alpha = alpha;
    if (ev->count("--max-len")) o.max_len = max_len;
    if (ev->count("--warmup")) o.warmup = warmup;
    if (strip) o.strip_diacritics = 1;
    o.beam_sweep = ks.data();
    o.num_beam_sweep = ks.size();
    o.out_dir = out.c_str();
    st = tl_evaluate(ctx, &o);
  } else if (sy->parsed()) {
    st = tl_synth(ctx, kind.c_str(), count, seed, out.c_str());
  }
  if (st == TL_OK && g.json) std::printf("%s\n", tl_context_result(ctx));
  return report(st);
}
