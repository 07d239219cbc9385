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

#include "decoder/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/error.hpp"
#include "vocab/vocab.hpp"

namespace translit::decoder {
namespace {

// Ranking order: higher value first, then lexicographically smaller ids.
bool better(double a, const Ids& ta, double b, const Ids& tb) {
  if (a != b) return a > b;
  return ta < tb;
}

void rank(std::vector<Hypothesis>& hyps) {
  std::sort(hyps.begin(), hyps.end(),
            [](const Hypothesis& a, const Hypothesis& b) { return better(a.score, a.tokens, b.score, b.tokens); });
}

std::size_t step_limit(const Scorer& scorer, const DecodeConfig& cfg) {
  // Predicting generated token t needs a prefix of t tokens (SOS + t-1).
  return std::min(cfg.max_len, scorer.max_prefix());
}

}  // namespace

void DecodeConfig::validate() const {
  if (beam == 0) fail(ErrorKind::kConfig, "beam size must be at least 1");
  if (!(alpha >= 0) || !std::isfinite(alpha)) fail(ErrorKind::kConfig, "length-normalization alpha must be >= 0");
  if (max_len == 0) fail(ErrorKind::kConfig, "decode max_len must be positive");
}

double normalized_score(double logp, std::size_t length, double alpha) {
  if (length == 0) fail(ErrorKind::kInvalidArgument, "normalized_score: length must be at least 1");
  if (alpha == 0) return logp;
  return logp / std::pow(static_cast<double>(length), alpha);
}

std::vector<DecodeResult> greedy_decode(Scorer& scorer, const DecodeConfig& cfg) {
  cfg.validate();
  const std::size_t n = scorer.num_items();
  const std::size_t limit = step_limit(scorer, cfg);
  std::vector<Hypothesis> hyps(n);
  for (auto& h : hyps) h.tokens = {vocab::kSos};
  std::vector<std::size_t> live(n);
  std::iota(live.begin(), live.end(), 0);
  std::vector<Query> queries;
  std::vector<std::vector<double>> lp;
  for (std::size_t t = 0; t < limit && !live.empty(); ++t) {
    queries.clear();
    for (auto i : live) queries.push_back({i, hyps[i].tokens});
    scorer.next_log_probs(queries, lp);
    std::vector<std::size_t> still;
    for (std::size_t q = 0; q < live.size(); ++q) {
      const auto& row = lp[q];
      std::size_t arg = 0;
      for (std::size_t v = 1; v < row.size(); ++v)
        if (row[v] > row[arg]) arg = v;
      Hypothesis& h = hyps[live[q]];
      h.tokens.push_back(static_cast<std::int32_t>(arg));
      h.logp += row[arg];
      if (static_cast<std::int32_t>(arg) == vocab::kEos) {
        h.finished = true;
      } else {
        still.push_back(live[q]);
      }
    }
    live = std::move(still);
  }
  std::vector<DecodeResult> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Hypothesis& h = hyps[i];
    h.score = h.length() == 0 ? h.logp : normalized_score(h.logp, h.length(), cfg.alpha);
    out[i].best = h;
    out[i].nbest = {h};
  }
  return out;
}

std::vector<DecodeResult> beam_decode(Scorer& scorer, const DecodeConfig& cfg) {
  cfg.validate();
  const std::size_t n = scorer.num_items();
  const std::size_t k = cfg.beam;
  const std::size_t limit = step_limit(scorer, cfg);
  // Live hypotheses carry the level (1..k) that selected them.
  struct Live {
    Hypothesis hyp;
    std::size_t level;
  };
  std::vector<std::vector<Live>> live(n);
  std::vector<std::vector<Hypothesis>> pool(n);
  for (auto& l : live) l.push_back({Hypothesis{{vocab::kSos}, 0.0, false, 0.0}, 1});

  struct Cand {
    double logp;
    std::size_t hyp;
    std::int32_t token;
  };
  std::vector<Query> queries;
  std::vector<std::vector<double>> lp;
  std::vector<Cand> cands;
  std::vector<std::uint8_t> taken;
  for (std::size_t t = 0; t < limit; ++t) {
    queries.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& h : live[i]) queries.push_back({i, h.hyp.tokens});
    if (queries.empty()) break;
    scorer.next_log_probs(queries, lp);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto& beam = live[i];
      if (beam.empty()) continue;
      // Live hypotheses share a length and are kept in id order, so the
      // (parent, token) order of a candidate is its lexicographic order.
      cands.clear();
      for (std::size_t h = 0; h < beam.size(); ++h) {
        const auto& r = lp[row + h];
        for (std::size_t v = 0; v < r.size(); ++v)
          if (std::isfinite(r[v])) cands.push_back({beam[h].hyp.logp + r[v], h, static_cast<std::int32_t>(v)});
      }
      row += beam.size();
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        if (a.hyp != b.hyp) return a.hyp < b.hyp;
        return a.token < b.token;
      });
      // Level j takes the best unclaimed extension of the hypotheses held
      // by levels 1..j, so the search of beam j is contained in beam j+1.
      taken.assign(cands.size(), 0);
      std::vector<Live> next;
      for (std::size_t level = 1; level <= k; ++level) {
        std::size_t c = 0;
        while (c < cands.size() && (taken[c] || beam[cands[c].hyp].level > level)) ++c;
        if (c == cands.size()) continue;
        taken[c] = 1;
        Hypothesis h;
        h.tokens = beam[cands[c].hyp].hyp.tokens;
        h.tokens.push_back(cands[c].token);
        h.logp = cands[c].logp;
        if (cands[c].token == vocab::kEos) {
          h.finished = true;
          h.score = normalized_score(h.logp, h.length(), cfg.alpha);
          pool[i].push_back(std::move(h));
        } else {
          next.push_back({std::move(h), level});
        }
      }
      std::sort(next.begin(), next.end(), [](const Live& a, const Live& b) { return a.hyp.tokens < b.hyp.tokens; });
      beam = std::move(next);
      // Every completion of a live hypothesis has log-prob <= its current
      // one and length <= limit, so it scores at most logp / limit^alpha.
      if (!pool[i].empty()) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& h : pool[i]) best = std::max(best, h.score);
        const bool open = std::any_of(beam.begin(), beam.end(), [&](const Live& l) {
          return normalized_score(l.hyp.logp, limit, cfg.alpha) > best;
        });
        if (!open) beam.clear();
      }
    }
  }
  std::vector<DecodeResult> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Hypothesis> final = std::move(pool[i]);
    if (final.empty()) {
      for (auto& l : live[i]) {
        Hypothesis& h = l.hyp;
        h.score = h.length() == 0 ? h.logp : normalized_score(h.logp, h.length(), cfg.alpha);
        final.push_back(std::move(h));
      }
    }
    if (final.empty()) fail(ErrorKind::kInternal, "beam search produced no hypothesis");
    rank(final);
    if (final.size() > k) final.resize(k);
    out[i].best = final.front();
    out[i].nbest = std::move(final);
  }
  return out;
}

TableScorer::TableScorer(std::size_t vocab, std::size_t max_prefix, std::vector<double> fallback)
    : vocab_(vocab), max_prefix_(max_prefix) {
  if (fallback.size() != vocab) fail(ErrorKind::kInvalidArgument, "table scorer: fallback size mismatch");
  fallback_.resize(vocab);
  for (std::size_t v = 0; v < vocab; ++v) fallback_[v] = std::log(fallback[v]);
}

void TableScorer::set(const Ids& prefix, const std::vector<double>& probs) {
  if (probs.size() != vocab_) fail(ErrorKind::kInvalidArgument, "table scorer: distribution size mismatch");
  std::vector<double> logs(vocab_);
  for (std::size_t v = 0; v < vocab_; ++v) logs[v] = std::log(probs[v]);
  table_[prefix] = std::move(logs);
}

void TableScorer::next_log_probs(std::span<const Query> queries, std::vector<std::vector<double>>& out) {
  out.resize(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].prefix.size() > max_prefix_) fail(ErrorKind::kInvalidArgument, "table scorer: prefix too long");
    auto it = table_.find(queries[i].prefix);
    out[i] = it == table_.end() ? fallback_ : it->second;
  }
}

Hypothesis exhaustive_best(Scorer& scorer, std::size_t max_len, double alpha) {
  Hypothesis best;
  bool have = false;
  std::vector<Hypothesis> frontier{Hypothesis{{vocab::kSos}, 0.0, false, 0.0}};
  const std::size_t limit = std::min(max_len, scorer.max_prefix());
  std::vector<std::vector<double>> lp;
  for (std::size_t t = 0; t < limit && !frontier.empty(); ++t) {
    std::vector<Hypothesis> next;
    for (const auto& h : frontier) {
      const Query q{0, h.tokens};
      scorer.next_log_probs(std::span<const Query>(&q, 1), lp);
      for (std::size_t v = 0; v < lp[0].size(); ++v) {
        if (!std::isfinite(lp[0][v])) continue;
        Hypothesis c{h.tokens, h.logp + lp[0][v], false, 0.0};
        c.tokens.push_back(static_cast<std::int32_t>(v));
        if (static_cast<std::int32_t>(v) == vocab::kEos) {
          c.finished = true;
          c.score = normalized_score(c.logp, c.length(), alpha);
          if (!have || better(c.score, c.tokens, best.score, best.tokens)) {
            best = c;
            have = true;
          }
        } else {
          next.push_back(std::move(c));
        }
      }
    }
    frontier = std::move(next);
  }
  if (!have) fail(ErrorKind::kNotFound, "exhaustive search found no finished sequence");
  return best;
}

}  // namespace translit::decoder
