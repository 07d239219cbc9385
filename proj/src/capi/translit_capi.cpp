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

#include "translit/translit.h"

#include <memory>
#include <new>
#include <optional>
#include <string>

#include "common/error.hpp"
#include "config/config.hpp"
#include "corpus/corpus.hpp"
#include "decoder/decoder.hpp"
#include "evaluation/metrics.hpp"
#include "models/model.hpp"
#include "pipeline/pipeline.hpp"
#include "rules/rules.hpp"
#include "textnorm/textnorm.hpp"

using namespace translit;

struct tl_context {
  Config config;
  std::string result = "{}";
  std::string scratch;
  tl_log_fn log = nullptr;
  void* log_user = nullptr;

  pipeline::Logger logger() const {
    if (!log) return {};
    return [fn = log, user = log_user](const std::string& m) { fn(m.c_str(), user); };
  }
};

struct tl_model {
  models::ModelBundle bundle;
  textnorm::Normalizer norm;
  std::string text;
  std::string info;
};

struct tl_rules {
  std::optional<rules::RuleTransliterator> rt;
  textnorm::Normalizer norm;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

tl_status to_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidArgument: return TL_ERR_INVALID_ARGUMENT;
    case ErrorKind::kConfig: return TL_ERR_CONFIG;
    case ErrorKind::kNotFound: return TL_ERR_NOT_FOUND;
    case ErrorKind::kIo: return TL_ERR_IO;
    case ErrorKind::kParse: return TL_ERR_PARSE;
    case ErrorKind::kNumeric: return TL_ERR_NUMERIC;
    case ErrorKind::kInternal: return TL_ERR_INTERNAL;
  }
  return TL_ERR_INTERNAL;
}

template <typename F>
tl_status guard(F&& f) {
  try {
    f();
    return TL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::kInvalidArgument, std::string(what) + " must not be null");
}

std::string str(const char* s, const char* what) {
  need(s, what);
  return s;
}

pipeline::DecodeSettings settings(const tl_decode_options* o, const Config& config) {
  pipeline::DecodeSettings d = pipeline::decode_settings(config);
  if (o) {
    if (o->mode) d.mode = o->mode;
    d.beam = o->beam;
    d.alpha = o->alpha;
    d.max_len = o->max_len;
    d.nbest = o->nbest;
  }
  return d;
}

}  // namespace

extern "C" {

const char* tl_version(void) { return TRANSLIT_VERSION; }

const char* tl_status_name(tl_status s) {
  switch (s) {
    case TL_OK: return "ok";
    case TL_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case TL_ERR_CONFIG: return "config";
    case TL_ERR_NOT_FOUND: return "not-found";
    case TL_ERR_IO: return "io";
    case TL_ERR_PARSE: return "parse";
    case TL_ERR_NUMERIC: return "numeric";
    case TL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tl_last_error(void) { return g_last_error.c_str(); }

tl_status tl_context_new(const char* config_path, tl_context** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto ctx = std::make_unique<tl_context>();
    if (config_path && *config_path) ctx->config = Config::load(config_path);
    *out = ctx.release();
  });
}

void tl_context_free(tl_context* ctx) { delete ctx; }

tl_status tl_context_set(tl_context* ctx, const char* key, const char* value) {
  return guard([&] {
    need(ctx, "context");
    ctx->config.set(str(key, "key"), str(value, "value"));
  });
}

tl_status tl_context_get(tl_context* ctx, const char* key, const char** value) {
  return guard([&] {
    need(ctx, "context");
    need(value, "value");
    ctx->scratch = ctx->config.get(str(key, "key"));
    *value = ctx->scratch.c_str();
  });
}

void tl_context_set_logger(tl_context* ctx, tl_log_fn fn, void* user) {
  if (!ctx) return;
  ctx->log = fn;
  ctx->log_user = user;
}

const char* tl_context_result(const tl_context* ctx) { return ctx ? ctx->result.c_str() : "{}"; }

tl_status tl_prepare(tl_context* ctx, const char* input, const char* out_dir) {
  return guard([&] {
    need(ctx, "context");
    pipeline::PrepareRequest req{str(input, "input"), str(out_dir, "out_dir")};
    ctx->result = pipeline::prepare(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_split(tl_context* ctx, const char* input, const char* out_dir, const tl_split_options* o) {
  return guard([&] {
    need(ctx, "context");
    pipeline::SplitRequest req;
    req.input = str(input, "input");
    req.out_dir = str(out_dir, "out_dir");
    if (o && o->has_seed) req.seed = o->seed;
    if (o && o->has_ratios) req.ratios = std::array<double, 3>{o->ratios[0], o->ratios[1], o->ratios[2]};
    ctx->result = pipeline::split(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_train(tl_context* ctx, const char* arch, const char* splits_dir, const char* out_dir, const char* resume,
                   const uint64_t* seed) {
  return guard([&] {
    need(ctx, "context");
    pipeline::TrainRequest req;
    req.arch = str(arch, "arch");
    req.splits_dir = str(splits_dir, "splits_dir");
    req.out_dir = str(out_dir, "out_dir");
    if (resume && *resume) req.resume = resume;
    if (seed) req.seed = *seed;
    ctx->result = pipeline::train(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_decode_options_init(tl_context* ctx, tl_decode_options* o) {
  return guard([&] {
    need(ctx, "context");
    need(o, "options");
    const auto d = pipeline::decode_settings(ctx->config);
    o->mode = "beam";
    o->beam = d.beam;
    o->alpha = d.alpha;
    o->max_len = d.max_len;
    o->nbest = 1;
  });
}

tl_status tl_translit_file(tl_context* ctx, const char* model, const char* lexicon, const tl_decode_options* o,
                           const char* in, const char* out) {
  return guard([&] {
    need(ctx, "context");
    pipeline::TranslitRequest req;
    if (model) req.model = model;
    if (!model) {
      req.rules = true;
      if (!lexicon) fail(ErrorKind::kConfig, "translit needs a model or a lexicon");
      req.lexicon = lexicon;
    }
    req.decode = settings(o, ctx->config);
    req.in = str(in, "in");
    req.out = str(out, "out");
    ctx->result = pipeline::translit(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_evaluate_options_init(tl_context* ctx, tl_evaluate_options* o) {
  return guard([&] {
    need(ctx, "context");
    need(o, "options");
    const auto d = pipeline::decode_settings(ctx->config);
    *o = tl_evaluate_options{};
    o->decode = "greedy";
    o->beam = d.beam;
    o->alpha = d.alpha;
    o->max_len = d.max_len;
    const auto warmup = ctx->config.get_int("eval.warmup");
    if (warmup < 0) fail(ErrorKind::kConfig, "eval.warmup must be >= 0");
    o->warmup = static_cast<size_t>(warmup);
    o->strip_diacritics = ctx->config.get_bool("eval.strip_diacritics") ? 1 : 0;
  });
}

tl_status tl_evaluate(tl_context* ctx, const tl_evaluate_options* o) {
  return guard([&] {
    need(ctx, "context");
    need(o, "options");
    pipeline::EvaluateRequest req;
    req.test = str(o->test, "test");
    if (o->num_systems) need(o->systems, "systems");
    for (size_t i = 0; i < o->num_systems; ++i) {
      pipeline::System s;
      switch (o->systems[i].kind) {
        case TL_SYSTEM_MODEL: s.kind = pipeline::System::kModel; break;
        case TL_SYSTEM_RULES: s.kind = pipeline::System::kRules; break;
        case TL_SYSTEM_PREDICTIONS: s.kind = pipeline::System::kPredictions; break;
        default: fail(ErrorKind::kInvalidArgument, "unknown system kind");
      }
      s.path = str(o->systems[i].path, "system path");
      req.systems.push_back(std::move(s));
    }
    req.decode = o->decode ? o->decode : "greedy";
    req.beam = o->beam;
    req.alpha = o->alpha;
    req.max_len = o->max_len;
    if (o->num_beam_sweep) need(o->beam_sweep, "beam_sweep");
    req.beam_sweep.assign(o->beam_sweep, o->beam_sweep + o->num_beam_sweep);
    req.warmup = o->warmup;
    req.strip_diacritics = o->strip_diacritics != 0;
    req.out_dir = str(o->out_dir, "out_dir");
    ctx->result = pipeline::evaluate(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_synth(tl_context* ctx, const char* kind, size_t count, uint64_t seed, const char* out) {
  return guard([&] {
    need(ctx, "context");
    pipeline::SynthRequest req{str(kind, "kind"), count, seed, str(out, "out")};
    ctx->result = pipeline::synth(ctx->config, req, ctx->logger()).dump();
  });
}

tl_status tl_model_load(tl_context* ctx, const char* path, tl_model** out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "out");
    *out = nullptr;
    auto m = std::unique_ptr<tl_model>(
        new tl_model{models::load_model(str(path, "path")), textnorm::Normalizer(ctx->config), {}, {}});
    nlohmann::ordered_json info = {{"arch", m->bundle.model->arch()},
                                   {"config", m->bundle.model->config_json()},
                                   {"parameters", m->bundle.model->params().count()},
                                   {"source_vocab", m->bundle.source.size()},
                                   {"target_vocab", m->bundle.target.size()}};
    m->info = info.dump();
    *out = m.release();
  });
}

void tl_model_free(tl_model* model) { delete model; }

tl_status tl_model_info(tl_model* model, const char** json) {
  return guard([&] {
    need(model, "model");
    need(json, "json");
    *json = model->info.c_str();
  });
}

tl_status tl_model_transliterate(tl_model* model, const char* word, const tl_decode_options* o, const char** text,
                                 double* score) {
  return guard([&] {
    need(model, "model");
    need(text, "text");
    decoder::DecodeConfig dc;
    std::string mode = "beam";
    if (o) {
      if (o->mode) mode = o->mode;
      dc.beam = o->beam;
      dc.alpha = o->alpha;
      dc.max_len = o->max_len;
    }
    if (mode != "greedy" && mode != "beam") fail(ErrorKind::kConfig, "decode mode must be greedy or beam");
    if (mode == "greedy") dc.beam = 1;
    const auto& b = model->bundle;
    auto scorer = b.model->scorer({b.source.encode(model->norm.normalize(str(word, "word")))});
    const auto r = mode == "greedy" ? decoder::greedy_decode(*scorer, dc) : decoder::beam_decode(*scorer, dc);
    model->text = b.target.decode(r.front().best.tokens);
    *text = model->text.c_str();
    if (score) *score = r.front().best.score;
  });
}

tl_status tl_rules_load(tl_context* ctx, const char* lexicon, tl_rules** out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "out");
    *out = nullptr;
    const auto recs = corpus::read_lexicon(str(lexicon, "lexicon"), corpus::PosHarmonizer::from_config(ctx->config));
    rules::RuleOptions opt;
    opt.boundary_aware = ctx->config.get_bool("rules.boundary_aware");
    auto r = std::unique_ptr<tl_rules>(new tl_rules{std::nullopt, textnorm::Normalizer(ctx->config), {}});
    r->rt.emplace(rules::build_trie(recs), rules::CharMap::from_config(ctx->config), opt);
    *out = r.release();
  });
}

void tl_rules_free(tl_rules* rules) { delete rules; }

tl_status tl_rules_transliterate(tl_rules* rules, const char* word, const char** text) {
  return guard([&] {
    need(rules, "rules");
    need(text, "text");
    rules->text = (*rules->rt)(rules->norm.normalize(str(word, "word")));
    *text = rules->text.c_str();
  });
}

tl_status tl_levenshtein(const char* a, const char* b, size_t* out) {
  return guard([&] {
    need(out, "out");
    *out = evaluation::levenshtein(str(a, "a"), str(b, "b"));
  });
}

tl_status tl_cer(const char* prediction, const char* reference, double* out) {
  return guard([&] {
    need(out, "out");
    *out = evaluation::cer(str(prediction, "prediction"), str(reference, "reference"));
  });
}

tl_status tl_chrf_pp(const char* prediction, const char* reference, double* out) {
  return guard([&] {
    need(out, "out");
    *out = evaluation::chrf_pp(str(prediction, "prediction"), str(reference, "reference"));
  });
}

}  // extern "C"
