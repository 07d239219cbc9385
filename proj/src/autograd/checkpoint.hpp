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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autograd/tensor.hpp"
#include "json.hpp"

namespace translit::ag {

enum class DType : std::uint8_t { kF32 = 1, kF64 = 2 };

struct Block {
  std::string name;
  DType dtype = DType::kF32;
  Shape shape;
  std::vector<std::uint8_t> payload;  // little-endian

  template <typename T>
  static Block from(const std::string& name, const Shape& shape, const std::vector<T>& data);
  template <typename T>
  std::vector<T> as() const;
};

// Versioned container: a text header (format version, architecture id,
// kind, hyperparameters, vocabularies and their hashes, optional training
// state) followed by named binary blocks.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  std::string arch;
  std::string kind = "model";
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string source_vocab;  // serialized CharVocab
  std::string target_vocab;
  std::optional<nlohmann::ordered_json> train_state;
  std::vector<Block> blocks;

  const Block* find(const std::string& name) const;

  std::string serialize() const;
  static Checkpoint parse(const std::string& bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

// Writes each parameter as a block (aliases are not repeated) and restores
// them by name with shape checks.
template <typename T>
void store_params(const ParamStore<T>& params, Checkpoint& ckpt, const std::string& prefix = {});
template <typename T>
void restore_params(ParamStore<T>& params, const Checkpoint& ckpt, const std::string& prefix = {});

}  // namespace translit::ag
