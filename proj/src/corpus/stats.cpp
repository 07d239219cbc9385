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

#include "corpus/stats.hpp"

#include <cmath>
#include <unordered_set>

#include "common/table.hpp"
#include "textnorm/utf8.hpp"

namespace translit::corpus {

LengthStats length_stats(std::span<const std::size_t> lengths) {
  LengthStats s;
  s.count = lengths.size();
  if (lengths.empty()) return s;
  double sum = 0;
  for (auto n : lengths) sum += static_cast<double>(n);
  const double mean = sum / static_cast<double>(lengths.size());
  double ss = 0;
  for (auto n : lengths) ss += (static_cast<double>(n) - mean) * (static_cast<double>(n) - mean);
  s.mean = mean;
  s.stddev = std::sqrt(ss / static_cast<double>(lengths.size()));
  return s;
}

SplitStats split_stats(std::span<const LexiconRecord> records) {
  std::vector<std::size_t> src, tgt;
  for (const auto& r : records) {
    src.push_back(utf8::length(r.tajik));
    tgt.push_back(utf8::length(r.persian));
  }
  return {records.size(), length_stats(src), length_stats(tgt)};
}

CorpusStats corpus_stats(std::span<const LexiconRecord> all, const SplitBundle* bundle) {
  CorpusStats st;
  st.total = all.size();
  std::unordered_set<std::string> tj, fa;
  for (int i = 0; i < kPosLabelCount; ++i) st.pos[i].label = static_cast<PosLabel>(i);
  for (const auto& r : all) {
    tj.insert(r.tajik);
    fa.insert(r.persian);
    ++st.pos[static_cast<int>(r.pos)].count;
  }
  st.unique_tajik = tj.size();
  st.unique_persian = fa.size();
  for (auto& p : st.pos) {
    p.share = st.total ? 100.0 * static_cast<double>(p.count) / static_cast<double>(st.total) : 0.0;
    if (p.label != PosLabel::kUnknown) st.labeled_total += p.count;
  }
  st.labeled_share =
      st.total ? 100.0 * static_cast<double>(st.labeled_total) / static_cast<double>(st.total) : 0.0;
  if (bundle) {
    for (int s = 0; s < 3; ++s) st.splits[s] = split_stats(bundle->splits[s]);
  }
  return st;
}

namespace {

Json length_json(const LengthStats& s) {
  Json j = Json::object();
  j["count"] = s.count;
  j["mean"] = s.mean ? Json(*s.mean) : Json(nullptr);
  j["std"] = s.stddev ? Json(*s.stddev) : Json(nullptr);
  if (!s.mean) j["undefined"] = true;
  return j;
}

std::string mean_std(const LengthStats& s) {
  if (!s.mean) return "n/a";
  return fixed(*s.mean, 1) + " ± " + fixed(*s.stddev, 1);
}

}  // namespace

Json stats_to_json(const CorpusStats& st, bool with_splits) {
  Json j = Json::object();
  j["total"] = st.total;
  j["unique_tajik"] = st.unique_tajik;
  j["unique_persian"] = st.unique_persian;
  if (with_splits) {
    Json sp = Json::object();
    for (int s = 0; s < 3; ++s) {
      Json e = Json::object();
      e["pairs"] = st.splits[s].pairs;
      e["tajik_length"] = length_json(st.splits[s].tajik);
      e["persian_length"] = length_json(st.splits[s].persian);
      sp[kSplitNames[s]] = e;
    }
    j["splits"] = sp;
  }
  Json pos = Json::array();
  for (const auto& p : st.pos) {
    Json e = Json::object();
    e["label"] = pos_name(p.label);
    e["count"] = p.count;
    e["share"] = p.share;
    pos.push_back(e);
  }
  j["pos"] = pos;
  j["labeled_total"] = st.labeled_total;
  j["labeled_share"] = st.labeled_share;
  return j;
}

std::string render_split_table(const CorpusStats& st) {
  using A = TextTable::Align;
  TextTable t({"Split", "Pairs", "Tajik (avg)", "Persian (avg)"}, {A::kLeft, A::kRight, A::kRight, A::kRight});
  const char* names[3] = {"Training", "Validation", "Test"};
  for (int s = 0; s < 3; ++s) {
    t.add_row({names[s], with_thousands(st.splits[s].pairs), mean_std(st.splits[s].tajik),
               mean_std(st.splits[s].persian)});
  }
  return t.render();
}

std::string render_pos_table(const CorpusStats& st) {
  using A = TextTable::Align;
  TextTable t({"Part of Speech", "Count", "Share (%)"}, {A::kLeft, A::kRight, A::kRight});
  for (const auto& p : st.pos) {
    if (p.label == PosLabel::kUnknown) continue;
    t.add_row({pos_display_name(p.label), with_thousands(p.count), fixed(p.share, 2)});
  }
  t.add_rule();
  t.add_row({"Labeled total", with_thousands(st.labeled_total), fixed(st.labeled_share, 2)});
  const auto& u = st.pos[static_cast<int>(PosLabel::kUnknown)];
  t.add_row({pos_display_name(u.label), with_thousands(u.count), fixed(u.share, 2)});
  return t.render();
}

}  // namespace translit::corpus
