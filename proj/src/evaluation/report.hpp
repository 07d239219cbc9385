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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "json.hpp"

namespace translit::evaluation {

using Json = nlohmann::ordered_json;

struct EvalItem {
  std::string source;
  std::string reference;
  std::string prediction;
  corpus::PosLabel pos = corpus::PosLabel::kUnknown;
  double cer = 0;
  bool degenerate = false;
  bool exact = false;
  double error_score = 0;
  double chrf = 0;
  std::optional<double> score;  // normalized decoder score
  bool truncated = false;
  std::optional<double> decode_ms;
};

// Fills the metric fields from source/reference/prediction.
EvalItem make_item(std::string source, std::string reference, std::string prediction, corpus::PosLabel pos);

struct Stratum {
  std::string name;
  std::size_t n = 0;
  double cer = 0;
  double accuracy = 0;
};

struct EvalReport {
  std::vector<EvalItem> items;
  double cer = 0;        // mean of per-item CER
  double micro_cer = 0;  // total edits / total reference characters
  double accuracy = 0;
  double chrf = 0;
  std::optional<double> ms_per_word;
  std::size_t timed_items = 0;
  std::size_t warmup = 0;
  std::size_t truncated = 0;
  std::size_t degenerate = 0;
  // Noun, Adjective, Verb, Adverb, Other (when non-empty), All.
  std::vector<Stratum> strata;
  // One entry per POS label present.
  std::vector<Stratum> by_label;
  Json metadata = Json::object();
};

// Items in a fixed order; timing skips the first `warmup` timed items.
// Empty input is an error.
EvalReport summarize(std::vector<EvalItem> items, std::size_t warmup, Json metadata = Json::object());

Json report_to_json(const EvalReport& report, bool with_items);

// Test-set comparison layout: Model | CER | Acc. | Time (ms/word).
struct ModelRow {
  std::string model;
  double cer = 0;
  double accuracy = 0;
  std::optional<double> ms_per_word;
};
std::string render_model_table(std::span<const ModelRow> rows);
std::string model_label(const std::string& arch, const Json& config, const std::string& decode, std::size_t beam);

// Beam sweep layout: Beam | CER | Acc. | Hyps | Time.
struct BeamRow {
  std::size_t beam = 1;
  double cer = 0;
  double accuracy = 0;
  std::size_t hyps = 1;
  std::optional<double> ms_per_word;
};
std::string render_beam_table(std::span<const BeamRow> rows);

// POS layout: POS | N | CER | Acc.
std::string render_pos_table(const EvalReport& report);

// Predictions TSV: source, prediction, score (empty when absent).
std::string predictions_tsv(std::span<const EvalItem> items);

}  // namespace translit::evaluation
