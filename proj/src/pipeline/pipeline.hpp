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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config/config.hpp"
#include "json.hpp"

namespace translit::pipeline {

using Json = nlohmann::ordered_json;
using Path = std::filesystem::path;
using Logger = std::function<void(const std::string&)>;

// Summary of one command invocation, written as manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, const Config& config);

  void input(const Path& path);
  void output(const Path& path);
  void set(const std::string& key, Json value) { extra_[key] = std::move(value); }
  void seed(std::uint64_t s) { seed_ = s; }

  Json to_json() const;
  // Stamps the finish time and writes atomically.
  void write(const Path& path);

 private:
  std::string command_;
  std::string config_hash_;
  Json config_;
  std::string started_;
  std::string finished_;
  std::optional<std::uint64_t> seed_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json extra_ = Json::object();
};

struct PrepareRequest {
  Path input;
  Path out_dir;
};
Json prepare(const Config& config, const PrepareRequest& req, const Logger& log = {});

struct SplitRequest {
  Path input;
  Path out_dir;
  std::optional<std::uint64_t> seed;            // default split.seed
  std::optional<std::array<double, 3>> ratios;  // default split.ratios
};
Json split(const Config& config, const SplitRequest& req, const Logger& log = {});

struct TrainRequest {
  std::string arch;  // transformer | bilstm
  Path splits_dir;
  Path out_dir;
  std::optional<Path> resume;
  std::optional<std::uint64_t> seed;  // default train.seed
};
Json train(const Config& config, const TrainRequest& req, const Logger& log = {});

struct DecodeSettings {
  std::string mode = "beam";  // greedy | beam
  std::size_t beam = 3;
  double alpha = 0.6;
  std::size_t max_len = 128;
  std::size_t nbest = 1;  // rows per input in the output
};
DecodeSettings decode_settings(const Config& config);

struct TranslitRequest {
  std::optional<Path> model;    // neural checkpoint
  std::optional<Path> lexicon;  // rule mode: trie over this cleaned lexicon
  bool rules = false;
  DecodeSettings decode;
  Path in;
  Path out;
};
Json translit(const Config& config, const TranslitRequest& req, const Logger& log = {});

struct System {
  enum Kind { kModel, kRules, kPredictions } kind = kModel;
  Path path;  // checkpoint, lexicon, or predictions TSV
};

struct EvaluateRequest {
  Path test;
  std::vector<System> systems;
  std::string decode = "greedy";  // greedy | beam | both (model systems)
  std::size_t beam = 3;
  double alpha = 0.6;
  std::size_t max_len = 128;
  std::vector<std::size_t> beam_sweep;  // first Transformer system, else first model
  std::size_t warmup = 10;
  bool strip_diacritics = false;
  Path out_dir;
};
Json evaluate(const Config& config, const EvaluateRequest& req, const Logger& log = {});

struct SynthRequest {
  std::string kind = "cipher";  // cipher
  std::size_t count = 200;
  std::uint64_t seed = 42;
  Path out;
};
Json synth(const Config& config, const SynthRequest& req, const Logger& log = {});

}  // namespace translit::pipeline
