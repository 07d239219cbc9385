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

#include "evaluation/report.hpp"

#include <array>

#include "common/error.hpp"
#include "common/table.hpp"
#include "evaluation/metrics.hpp"
#include "textnorm/textnorm.hpp"
#include "textnorm/utf8.hpp"

namespace translit::evaluation {
namespace {

using corpus::PosLabel;
using Align = TextTable::Align;

Stratum stratum(std::string name, std::span<const EvalItem* const> items) {
  Stratum s{std::move(name), items.size(), 0, 0};
  if (items.empty()) return s;
  double cer_sum = 0;
  std::size_t hits = 0;
  for (const auto* it : items) {
    cer_sum += it->cer;
    hits += it->exact ? 1 : 0;
  }
  s.cer = cer_sum / static_cast<double>(items.size());
  s.accuracy = static_cast<double>(hits) / static_cast<double>(items.size());
  return s;
}

std::string time_cell(const std::optional<double>& ms) { return ms ? fixed(*ms, 1) : "-"; }

Json stratum_json(const Stratum& s) {
  Json j = Json::object();
  j["name"] = s.name;
  j["n"] = s.n;
  j["cer"] = s.cer;
  j["accuracy"] = s.accuracy;
  return j;
}

}  // namespace

EvalItem make_item(std::string source, std::string reference, std::string prediction, PosLabel pos) {
  EvalItem it;
  it.source = std::move(source);
  it.reference = std::move(reference);
  it.prediction = std::move(prediction);
  it.pos = pos;
  const auto c = cer_detail(it.prediction, it.reference);
  it.cer = c.value;
  it.degenerate = c.degenerate;
  it.exact = exact_match(it.prediction, it.reference);
  it.error_score = error_score(it.prediction, it.reference);
  it.chrf = chrf_pp(it.prediction, it.reference);
  return it;
}

EvalReport summarize(std::vector<EvalItem> items, std::size_t warmup, Json metadata) {
  if (items.empty()) fail(ErrorKind::kInvalidArgument, "evaluation needs at least one item");
  EvalReport r;
  r.items = std::move(items);
  r.warmup = warmup;
  r.metadata = std::move(metadata);
  const double n = static_cast<double>(r.items.size());
  double cer_sum = 0, chrf_sum = 0, edits = 0, ref_chars = 0, ms_sum = 0;
  std::size_t hits = 0, timed_seen = 0;
  for (const auto& it : r.items) {
    cer_sum += it.cer;
    chrf_sum += it.chrf;
    hits += it.exact ? 1 : 0;
    const auto ref = utf8::decode(textnorm::nfc_normalize(it.reference));
    edits += static_cast<double>(levenshtein(utf8::decode(textnorm::nfc_normalize(it.prediction)), ref));
    ref_chars += static_cast<double>(ref.size());
    r.truncated += it.truncated ? 1 : 0;
    r.degenerate += it.degenerate ? 1 : 0;
    if (it.decode_ms) {
      if (timed_seen++ >= warmup) {
        ms_sum += *it.decode_ms;
        ++r.timed_items;
      }
    }
  }
  r.cer = cer_sum / n;
  r.chrf = chrf_sum / n;
  r.accuracy = static_cast<double>(hits) / n;
  r.micro_cer = ref_chars > 0 ? edits / ref_chars : 0.0;
  if (r.timed_items > 0) r.ms_per_word = ms_sum / static_cast<double>(r.timed_items);

  std::array<std::vector<const EvalItem*>, corpus::kPosLabelCount> groups;
  std::vector<const EvalItem*> all, other;
  for (const auto& it : r.items) {
    groups[static_cast<int>(it.pos)].push_back(&it);
    all.push_back(&it);
  }
  for (PosLabel p : {PosLabel::kNoun, PosLabel::kAdjective, PosLabel::kVerb, PosLabel::kAdverb}) {
    r.strata.push_back(stratum(corpus::pos_display_name(p), groups[static_cast<int>(p)]));
  }
  for (int p = static_cast<int>(PosLabel::kProperNoun); p < corpus::kPosLabelCount; ++p) {
    other.insert(other.end(), groups[p].begin(), groups[p].end());
  }
  if (!other.empty()) r.strata.push_back(stratum("Other", other));
  r.strata.push_back(stratum("All", all));
  for (int p = 0; p < corpus::kPosLabelCount; ++p) {
    if (!groups[p].empty()) r.by_label.push_back(stratum(corpus::pos_name(static_cast<PosLabel>(p)), groups[p]));
  }
  return r;
}

Json report_to_json(const EvalReport& r, bool with_items) {
  Json j = Json::object();
  j["metadata"] = r.metadata;
  Json agg = Json::object();
  agg["n"] = r.items.size();
  agg["cer"] = r.cer;
  agg["cer_micro"] = r.micro_cer;
  agg["accuracy"] = r.accuracy;
  agg["chrf_pp"] = r.chrf;
  agg["ms_per_word"] = r.ms_per_word ? Json(*r.ms_per_word) : Json(nullptr);
  agg["timed_items"] = r.timed_items;
  agg["timing_warmup"] = r.warmup;
  agg["truncated"] = r.truncated;
  agg["degenerate_references"] = r.degenerate;
  j["aggregate"] = agg;
  j["strata"] = Json::array();
  for (const auto& s : r.strata) j["strata"].push_back(stratum_json(s));
  j["by_label"] = Json::array();
  for (const auto& s : r.by_label) j["by_label"].push_back(stratum_json(s));
  j["error_score_legend"] = {{"0", "exact match"}, {"0.5", "partial mismatch (CER below 1)"}, {"1", "CER of 1 or more"}};
  if (with_items) {
    Json items = Json::array();
    for (const auto& it : r.items) {
      Json e = Json::object();
      e["source"] = it.source;
      e["reference"] = it.reference;
      e["prediction"] = it.prediction;
      e["pos"] = corpus::pos_name(it.pos);
      e["cer"] = it.cer;
      e["exact"] = it.exact;
      e["error_score"] = it.error_score;
      e["chrf_pp"] = it.chrf;
      e["score"] = it.score ? Json(*it.score) : Json(nullptr);
      e["truncated"] = it.truncated;
      if (it.degenerate) e["degenerate_reference"] = true;
      e["decode_ms"] = it.decode_ms ? Json(*it.decode_ms) : Json(nullptr);
      items.push_back(std::move(e));
    }
    j["items"] = std::move(items);
  }
  return j;
}

std::string render_model_table(std::span<const ModelRow> rows) {
  TextTable t({"Model", "CER (↓)", "Acc. (↑)", "Time"}, {Align::kLeft, Align::kRight, Align::kRight, Align::kRight});
  for (const auto& r : rows) t.add_row({r.model, fixed(r.cer, 4), fixed(r.accuracy, 4), time_cell(r.ms_per_word)});
  return t.render() + "Times in ms/word, model load excluded.\n";
}

std::string model_label(const std::string& arch, const Json& config, const std::string& decode, std::size_t beam) {
  if (arch == "rules") return "Rule-based (dict.)";
  std::string decoding = decode == "beam" ? "beam " + std::to_string(beam) : "greedy";
  if (arch.rfind("bilstm", 0) == 0) {
    std::vector<std::string> notes;
    if (config.contains("hidden_size")) notes.push_back(std::to_string(config["hidden_size"].get<std::size_t>()));
    if (decode == "beam") notes.push_back(decoding);
    std::string label = "BiLSTM";
    for (std::size_t i = 0; i < notes.size(); ++i) label += (i ? ", " : " (") + notes[i];
    return notes.empty() ? label : label + ")";
  }
  return "Transf. (" + decoding + ")";
}

std::string render_beam_table(std::span<const BeamRow> rows) {
  TextTable t({"Beam", "CER", "Acc.", "Hyps", "Time"},
              {Align::kLeft, Align::kRight, Align::kRight, Align::kRight, Align::kRight});
  for (const auto& r : rows) {
    const std::string beam = r.beam == 1 ? "1 (greedy)" : std::to_string(r.beam);
    t.add_row({beam, fixed(r.cer, 4), fixed(r.accuracy, 4), std::to_string(r.hyps), time_cell(r.ms_per_word)});
  }
  return t.render() + "Times in ms/word, model load excluded.\n";
}

std::string render_pos_table(const EvalReport& report) {
  TextTable t({"POS", "N", "CER (↓)", "Acc. (↑)"}, {Align::kLeft, Align::kRight, Align::kRight, Align::kRight});
  for (const auto& s : report.strata) {
    if (s.name == "All") t.add_rule();
    t.add_row({s.name, with_thousands(s.n), fixed(s.cer, 4), fixed(s.accuracy, 4)});
  }
  return t.render() + "N = sample count.\n";
}

std::string predictions_tsv(std::span<const EvalItem> items) {
  std::string out;
  for (const auto& it : items) {
    out += it.source + "\t" + it.prediction + "\t";
    if (it.score) out += fixed(*it.score, 6);
    out += "\n";
  }
  return out;
}

}  // namespace translit::evaluation
