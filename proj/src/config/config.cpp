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

#include "config/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <sstream>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "common/hash.hpp"
#include "translit_embedded_data.hpp"

namespace translit {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::map<std::string, std::string> parse_ini(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::kConfig, std::string("config: ") + e.message() + " at line " +
                                 std::to_string(e.line()));
  }
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      fail(ErrorKind::kConfig, "config: key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      out[section + "." + key] = trim(value.data());
    }
  }
  return out;
}

}  // namespace

Config::Config() {
  for (auto& [k, v] : parse_ini(embedded::kDefaultConfig)) {
    values_[k] = v;
    origins_[k] = Origin{};
  }
}

Config Config::load(const fs::path& path) {
  Config c;
  c.merge_ini(read_file(path), fs::absolute(path).parent_path());
  return c;
}

Config Config::from_string(std::string_view ini_text, const fs::path& base_dir) {
  Config c;
  c.merge_ini(ini_text, base_dir);
  return c;
}

void Config::merge_ini(std::string_view ini_text, const fs::path& base_dir) {
  for (auto& [k, v] : parse_ini(ini_text)) {
    if (!values_.count(k)) fail(ErrorKind::kConfig, "config: unknown key '" + k + "'");
    values_[k] = v;
    origins_[k] = Origin{base_dir, false};
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) fail(ErrorKind::kConfig, "config: unknown key '" + key + "'");
  values_[key] = trim(value);
  origins_[key] = Origin{fs::current_path(), false};
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::kConfig, "config: missing key '" + key + "'");
  return it->second;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string& s = get(key);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(ErrorKind::kConfig, "config: '" + key + "' is not an integer: " + s);
  return v;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kConfig, "config: '" + key + "' is not a number: " + s);
  }
}

bool Config::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(ErrorKind::kConfig, "config: '" + key + "' is not a boolean: " + s);
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::string cur;
  for (char c : get(key)) {
    if (c == ',') {
      if (auto t = trim(cur); !t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (auto t = trim(cur); !t.empty()) out.push_back(t);
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::kConfig, "config: '" + key + "' has a non-numeric item: " + item);
    }
  }
  return out;
}

std::optional<fs::path> Config::get_path(const std::string& key) const {
  const std::string& v = get(key);
  const Origin& o = origins_.at(key);
  if (v.empty() || v == "builtin" || o.builtin) return std::nullopt;
  fs::path p(v);
  if (p.is_relative() && !o.dir.empty()) p = o.dir / p;
  return p;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string Config::hash() const { return sha256_hex(canonical()); }

}  // namespace translit
