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

#include "corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace translit::corpus {
namespace {

constexpr double kEps = 1e-9;

void check_ratios(const std::array<double, 3>& r) {
  double sum = 0;
  for (double x : r) {
    if (!(x > 0.0)) fail(ErrorKind::kInvalidArgument, "split ratios must be positive");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kEps) fail(ErrorKind::kInvalidArgument, "split ratios must sum to 1");
}

// Max-flow over a bipartite strata x splits graph with unit edge capacities.
// Returns false if the residual targets cannot be met.
bool round_residuals(const std::vector<std::array<double, 3>>& frac, std::vector<std::size_t> row_need,
                     std::array<std::size_t, 3> col_need, std::uint64_t seed,
                     std::vector<std::array<std::size_t, 3>>& extra) {
  const std::size_t S = frac.size();
  extra.assign(S, {0, 0, 0});
  struct Edge {
    double frac;
    std::size_t s;
    int j;
    std::size_t tie;
  };
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < S; ++s) {
    if (row_need[s] == 0) continue;
    std::array<std::size_t, 3> perm{0, 1, 2};
    Rng rng(stream_seed(seed, "split-tie", s));
    rng.shuffle(std::span<std::size_t>(perm));
    for (int j = 0; j < 3; ++j) {
      if (frac[s][j] > kEps) edges.push_back({frac[s][j], s, j, perm[j]});
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.frac != b.frac) return a.frac > b.frac;
    if (a.s != b.s) return a.s < b.s;
    return a.tie < b.tie;
  });
  std::vector<std::array<bool, 3>> allowed(S, {false, false, false});
  for (const Edge& e : edges) {
    allowed[e.s][e.j] = true;
    if (row_need[e.s] > 0 && col_need[e.j] > 0) {
      extra[e.s][e.j] = 1;
      --row_need[e.s];
      --col_need[e.j];
    }
  }
  // Augmenting paths: source -> stratum (needs more) -> split -> ... -> split with need.
  for (;;) {
    std::size_t open_row = S;
    for (std::size_t s = 0; s < S; ++s)
      if (row_need[s] > 0) {
        open_row = s;
        break;
      }
    if (open_row == S) return true;
    // BFS over nodes: strata [0,S), splits [S, S+3).
    const std::size_t N = S + 3;
    std::vector<std::ptrdiff_t> prev(N, -1);
    std::deque<std::size_t> q{open_row};
    prev[open_row] = static_cast<std::ptrdiff_t>(open_row);
    std::ptrdiff_t sink = -1;
    while (!q.empty() && sink < 0) {
      const std::size_t u = q.front();
      q.pop_front();
      if (u < S) {
        for (int j = 0; j < 3; ++j) {
          const std::size_t v = S + j;
          if (allowed[u][j] && extra[u][j] == 0 && prev[v] < 0) {
            prev[v] = static_cast<std::ptrdiff_t>(u);
            if (col_need[j] > 0) {
              sink = static_cast<std::ptrdiff_t>(v);
              break;
            }
            q.push_back(v);
          }
        }
      } else {
        const int j = static_cast<int>(u - S);
        for (std::size_t s = 0; s < S; ++s) {
          if (extra[s][j] == 1 && prev[s] < 0) {
            prev[s] = static_cast<std::ptrdiff_t>(u);
            q.push_back(s);
          }
        }
      }
    }
    if (sink < 0) return false;
    std::size_t v = static_cast<std::size_t>(sink);
    --col_need[v - S];
    while (v != open_row) {
      const std::size_t u = static_cast<std::size_t>(prev[v]);
      if (u < S) {
        extra[u][v - S] = 1;
      } else {
        extra[v][u - S] = 0;
      }
      v = u;
    }
    --row_need[open_row];
  }
}

}  // namespace

std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> out{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (int j = 0; j < 3; ++j) {
    const double q = ratios[j] * static_cast<double>(total);
    out[j] = static_cast<std::size_t>(std::floor(q + kEps));
    rem[j] = q - static_cast<double>(out[j]);
    used += out[j];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b] + kEps; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[order[k % 3]];
  return out;
}

Allocation allocate(std::span<const std::size_t> sizes, const std::array<double, 3>& ratios,
                    std::uint64_t seed) {
  check_ratios(ratios);
  const std::size_t S = sizes.size();
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  const auto global = apportion(total, ratios);

  Allocation a;
  a.cells.assign(S, {0, 0, 0});
  std::vector<std::array<double, 3>> frac(S);
  std::vector<std::size_t> row_need(S, 0);
  std::array<std::size_t, 3> col_need = global;
  for (std::size_t s = 0; s < S; ++s) {
    std::size_t used = 0;
    for (int j = 0; j < 3; ++j) {
      const double q = ratios[j] * static_cast<double>(sizes[s]);
      a.cells[s][j] = static_cast<std::size_t>(std::floor(q + kEps));
      frac[s][j] = std::max(0.0, q - static_cast<double>(a.cells[s][j]));
      used += a.cells[s][j];
      col_need[j] -= a.cells[s][j];
    }
    row_need[s] = sizes[s] - used;
  }
  std::vector<std::array<std::size_t, 3>> extra;
  if (round_residuals(frac, row_need, col_need, seed, extra)) {
    for (std::size_t s = 0; s < S; ++s)
      for (int j = 0; j < 3; ++j) a.cells[s][j] += extra[s][j];
    a.method = "controlled-rounding";
  } else {
    for (std::size_t s = 0; s < S; ++s) a.cells[s] = apportion(sizes[s], ratios);
    a.method = "per-stratum-largest-remainder";
  }
  return a;
}

SplitBundle stratified_split(std::span<const LexiconRecord> records, const std::array<double, 3>& ratios,
                             std::uint64_t seed) {
  check_ratios(ratios);
  std::vector<std::vector<std::size_t>> strata(kPosLabelCount);
  for (std::size_t i = 0; i < records.size(); ++i) strata[static_cast<int>(records[i].pos)].push_back(i);
  std::vector<std::size_t> sizes(kPosLabelCount);
  for (int s = 0; s < kPosLabelCount; ++s) sizes[s] = strata[s].size();
  const Allocation alloc = allocate(sizes, ratios, seed);

  SplitBundle b;
  b.seed = seed;
  b.ratios = ratios;
  b.method = alloc.method;
  for (int s = 0; s < kPosLabelCount; ++s) {
    auto& idx = strata[s];
    Rng rng(stream_seed(seed, "split", static_cast<std::uint64_t>(s)));
    rng.shuffle(std::span<std::size_t>(idx));
    std::size_t at = 0;
    for (int j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < alloc.cells[s][j]; ++k) b.indices[j].push_back(idx[at++]);
    }
  }
  for (int j = 0; j < 3; ++j) {
    std::sort(b.indices[j].begin(), b.indices[j].end());
    for (std::size_t i : b.indices[j]) b.splits[j].push_back(records[i]);
  }
  return b;
}

Json manifest_to_json(const SplitBundle& b) {
  Json j = Json::object();
  j["seed"] = b.seed;
  j["ratios"] = b.ratios;
  j["method"] = b.method;
  j["strata"] = "pos-label, unknown-pos-as-own-stratum";
  j["stratum_order"] = Json::array();
  for (int s = 0; s < kPosLabelCount; ++s) j["stratum_order"].push_back(pos_name(static_cast<PosLabel>(s)));
  Json sizes = Json::object();
  Json idx = Json::object();
  for (int s = 0; s < 3; ++s) {
    sizes[kSplitNames[s]] = b.indices[s].size();
    idx[kSplitNames[s]] = b.indices[s];
  }
  j["sizes"] = sizes;
  j["indices"] = idx;
  return j;
}

SplitBundle apply_manifest(std::span<const LexiconRecord> records, const Json& manifest) {
  SplitBundle b;
  try {
    b.seed = manifest.at("seed").get<std::uint64_t>();
    b.ratios = manifest.at("ratios").get<std::array<double, 3>>();
    b.method = manifest.value("method", "");
    std::vector<bool> seen(records.size(), false);
    for (int s = 0; s < 3; ++s) {
      b.indices[s] = manifest.at("indices").at(kSplitNames[s]).get<std::vector<std::size_t>>();
      for (std::size_t i : b.indices[s]) {
        if (i >= records.size() || seen[i]) {
          fail(ErrorKind::kParse, "manifest index " + std::to_string(i) + " out of range or repeated");
        }
        seen[i] = true;
        b.splits[s].push_back(records[i]);
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("malformed split manifest: ") + e.what());
  }
  return b;
}

}  // namespace translit::corpus
