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
#include <cstdint>
#include <span>
#include <vector>

namespace translit::decoder {

using Ids = std::vector<std::int32_t>;

// One request for the next-token distribution of `item` after `prefix`
// (which starts with SOS).
struct Query {
  std::size_t item = 0;
  Ids prefix;
};

// Next-token log-probability source for a fixed set of input items.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::size_t num_items() const = 0;
  virtual std::size_t vocab_size() const = 0;
  // Largest prefix length (SOS included) the scorer accepts.
  virtual std::size_t max_prefix() const = 0;

  // out[i] = log-softmax over the vocabulary following queries[i].prefix.
  virtual void next_log_probs(std::span<const Query> queries, std::vector<std::vector<double>>& out) = 0;
};

}  // namespace translit::decoder
