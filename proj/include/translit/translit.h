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

#ifndef TRANSLIT_TRANSLIT_H_
#define TRANSLIT_TRANSLIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TL_BUILDING_LIBRARY)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure the message is available
 * from tl_last_error() on the same thread until the next failing call. */
typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_INVALID_ARGUMENT = 1,
  TL_ERR_CONFIG = 2,
  TL_ERR_NOT_FOUND = 3,
  TL_ERR_IO = 4,
  TL_ERR_PARSE = 5,
  TL_ERR_NUMERIC = 6,
  TL_ERR_INTERNAL = 7
} tl_status;

typedef struct tl_context tl_context;
typedef struct tl_model tl_model;
typedef struct tl_rules tl_rules;

typedef void (*tl_log_fn)(const char* message, void* user);

TL_API const char* tl_version(void);
TL_API const char* tl_status_name(tl_status status);
TL_API const char* tl_last_error(void);

/* Configuration: built-in defaults, then the optional INI file, then
 * tl_context_set overrides ("section.key"). */
TL_API tl_status tl_context_new(const char* config_path, tl_context** out);
TL_API void tl_context_free(tl_context* ctx);
TL_API tl_status tl_context_set(tl_context* ctx, const char* key, const char* value);
/* The returned string lives until the next call on ctx. */
TL_API tl_status tl_context_get(tl_context* ctx, const char* key, const char** value);
TL_API void tl_context_set_logger(tl_context* ctx, tl_log_fn fn, void* user);
/* JSON summary of the last successful command on ctx ("{}" before any). */
TL_API const char* tl_context_result(const tl_context* ctx);

/* Pipeline commands. Each writes its artifacts and a manifest. */
TL_API tl_status tl_prepare(tl_context* ctx, const char* input, const char* out_dir);

typedef struct tl_split_options {
  int has_seed;
  uint64_t seed;
  int has_ratios;
  double ratios[3];
} tl_split_options;
TL_API tl_status tl_split(tl_context* ctx, const char* input, const char* out_dir, const tl_split_options* options);

/* arch: "transformer" or "bilstm". resume and seed may be NULL. */
TL_API tl_status tl_train(tl_context* ctx, const char* arch, const char* splits_dir, const char* out_dir,
                          const char* resume, const uint64_t* seed);

typedef struct tl_decode_options {
  const char* mode; /* "greedy" or "beam" */
  size_t beam;
  double alpha;
  size_t max_len;
  size_t nbest;
} tl_decode_options;
/* Fills options from the context's [decode] section. */
TL_API tl_status tl_decode_options_init(tl_context* ctx, tl_decode_options* options);

/* Neural mode when model is non-NULL; rule mode uses lexicon. Output rows
 * are source<TAB>prediction<TAB>score. */
TL_API tl_status tl_translit_file(tl_context* ctx, const char* model, const char* lexicon,
                                  const tl_decode_options* options, const char* in, const char* out);

typedef enum tl_system_kind { TL_SYSTEM_MODEL = 0, TL_SYSTEM_RULES = 1, TL_SYSTEM_PREDICTIONS = 2 } tl_system_kind;
typedef struct tl_system {
  tl_system_kind kind;
  const char* path; /* checkpoint, lexicon, or predictions file */
} tl_system;

typedef struct tl_evaluate_options {
  const char* test;
  const tl_system* systems;
  size_t num_systems;
  const char* decode; /* "greedy", "beam" or "both" */
  size_t beam;
  double alpha;
  size_t max_len;
  const size_t* beam_sweep;
  size_t num_beam_sweep;
  size_t warmup;
  int strip_diacritics;
  const char* out_dir;
} tl_evaluate_options;
/* Fills options from the context's [decode] and [eval] sections. */
TL_API tl_status tl_evaluate_options_init(tl_context* ctx, tl_evaluate_options* options);
TL_API tl_status tl_evaluate(tl_context* ctx, const tl_evaluate_options* options);

/* kind: "cipher". */
TL_API tl_status tl_synth(tl_context* ctx, const char* kind, size_t count, uint64_t seed, const char* out);

/* In-process inference. Strings returned through out parameters stay valid
 * until the next call on the same handle. */
TL_API tl_status tl_model_load(tl_context* ctx, const char* path, tl_model** out);
TL_API void tl_model_free(tl_model* model);
TL_API tl_status tl_model_info(tl_model* model, const char** json);
TL_API tl_status tl_model_transliterate(tl_model* model, const char* word, const tl_decode_options* options,
                                        const char** text, double* score);

TL_API tl_status tl_rules_load(tl_context* ctx, const char* lexicon, tl_rules** out);
TL_API void tl_rules_free(tl_rules* rules);
TL_API tl_status tl_rules_transliterate(tl_rules* rules, const char* word, const char** text);

/* Metrics on UTF-8 strings. */
TL_API tl_status tl_levenshtein(const char* a, const char* b, size_t* out);
TL_API tl_status tl_cer(const char* prediction, const char* reference, double* out);
TL_API tl_status tl_chrf_pp(const char* prediction, const char* reference, double* out);

#ifdef __cplusplus
}
#endif

#endif /* TRANSLIT_TRANSLIT_H_ */
