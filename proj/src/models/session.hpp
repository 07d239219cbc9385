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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "common/error.hpp"
#include "decoder/scorer.hpp"

namespace translit::models {

// Log-softmax of one row of logits, evaluated in double.
template <typename T>
void log_softmax_row(const T* x, std::size_t V, std::vector<double>& out) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < V; ++j) mx = std::max(mx, static_cast<double>(x[j]));
  double z = 0;
  for (std::size_t j = 0; j < V; ++j) z += std::exp(static_cast<double>(x[j]) - mx);
  const double lse = mx + std::log(z);
  out.resize(V);
  for (std::size_t j = 0; j < V; ++j) out[j] = static_cast<double>(x[j]) - lse;
}

// Scorer base that caches one decoder state per (item, prefix). A call
// advances each requested prefix from its parent state in one batched
// step; states that no query of the call touched are dropped afterwards.
// State must expose `std::vector<double> logp`.
template <typename State>
class CachedScorer : public decoder::Scorer {
 public:
  void next_log_probs(std::span<const decoder::Query> queries, std::vector<std::vector<double>>& out) override {
    using Key = std::pair<std::size_t, decoder::Ids>;
    std::map<Key, std::shared_ptr<State>> next;
    for (const auto& q : queries) {
      if (q.item >= num_items()) fail(ErrorKind::kInvalidArgument, "scorer: item index out of range");
      if (q.prefix.empty()) fail(ErrorKind::kInvalidArgument, "scorer: prefix must start with SOS");
      if (q.prefix.size() > max_prefix()) fail(ErrorKind::kInvalidArgument, "scorer: prefix longer than the model's maximum length");
    }
    // Batched step for queries whose parent state is cached.
    std::vector<const State*> parents;
    std::vector<std::int32_t> tokens;
    std::vector<std::size_t> items;
    std::vector<Key> keys;
    for (const auto& q : queries) {
      Key key{q.item, q.prefix};
      if (next.count(key)) continue;
      if (auto it = cache_.find(key); it != cache_.end()) {
        next.emplace(key, it->second);
        continue;
      }
      const State* parent = lookup_parent(q.item, q.prefix);
      if (!parent) {
        next.emplace(key, rebuild(q.item, q.prefix));
        continue;
      }
      parents.push_back(parent);
      tokens.push_back(q.prefix.back());
      items.push_back(q.item);
      keys.push_back(std::move(key));
      next.emplace(keys.back(), nullptr);
    }
    if (!parents.empty()) {
      auto children = advance(parents, tokens, items);
      for (std::size_t i = 0; i < keys.size(); ++i) next[keys[i]] = children[i];
    }
    out.resize(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = next.at(Key{queries[i].item, queries[i].prefix})->logp;
    cache_ = std::move(next);
  }

 protected:
  // State before any target token has been consumed.
  virtual std::shared_ptr<State> initial(std::size_t item) const = 0;
  // Feeds tokens[i] to parents[i] (a state of items[i]).
  virtual std::vector<std::shared_ptr<State>> advance(const std::vector<const State*>& parents,
                                                      const std::vector<std::int32_t>& tokens,
                                                      const std::vector<std::size_t>& items) const = 0;

 private:
  const State* lookup_parent(std::size_t item, const decoder::Ids& prefix) {
    if (prefix.size() == 1) {
      auto& init = initial_[item];
      if (!init) init = initial(item);
      return init.get();
    }
    auto it = cache_.find({item, decoder::Ids(prefix.begin(), prefix.end() - 1)});
    return it == cache_.end() ? nullptr : it->second.get();
  }

  std::shared_ptr<State> rebuild(std::size_t item, const decoder::Ids& prefix) {
    auto& init = initial_[item];
    if (!init) init = initial(item);
    std::shared_ptr<State> s = init;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      s = advance({s.get()}, {prefix[i]}, {item}).front();
    }
    return s;
  }

  std::map<std::pair<std::size_t, decoder::Ids>, std::shared_ptr<State>> cache_;
  std::map<std::size_t, std::shared_ptr<State>> initial_;
};

}  // namespace translit::models
