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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace translit {

// Toolkit configuration: INI sections flattened to "section.key" entries.
// The built-in defaults (data/toolkit.ini) are always loaded first, so every
// documented key has a value; a user file and command-line overrides are
// layered on top. Each entry remembers the directory of the file that set
// it, which is what relative paths resolve against.
class Config {
 public:
  // Defaults only.
  Config();

  static Config load(const std::filesystem::path& path);
  static Config from_string(std::string_view ini_text,
                            const std::filesystem::path& base_dir = {});

  // Layers an INI document over the current values. Unknown keys are a
  // config error so typos do not pass silently.
  void merge_ini(std::string_view ini_text, const std::filesystem::path& base_dir);

  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // Resolved data-file path, or nullopt when the value selects the built-in
  // copy ("builtin", or a default that no user file overrode).
  std::optional<std::filesystem::path> get_path(const std::string& key) const;

  // Sorted key=value dump; its hash identifies the effective configuration.
  std::string canonical() const;
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  struct Origin {
    std::filesystem::path dir;
    bool builtin = true;
  };
  std::map<std::string, std::string> values_;
  std::map<std::string, Origin> origins_;
};

}  // namespace translit
