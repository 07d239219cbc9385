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

#include "corpus/corpus.hpp"

#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <array>
#include <set>
#include <sstream>
#include <tuple>

#include "common/error.hpp"
#include "common/fsutil.hpp"
#include "config/config.hpp"
#include "textnorm/textnorm.hpp"
#include "textnorm/utf8.hpp"
#include "translit_embedded_data.hpp"

namespace translit::corpus {
namespace {

struct PosNames {
  const char* id;
  const char* display;
};

constexpr std::array<PosNames, kPosLabelCount> kPosNames = {{
    {"Noun", "Noun"},
    {"Adjective", "Adjective"},
    {"Verb", "Verb"},
    {"Adverb", "Adverb"},
    {"ProperNoun", "Proper noun"},
    {"Interjection", "Interjection"},
    {"Numeral", "Numeral"},
    {"ConjunctionParticle", "Conjunction / Particle"},
    {"Preposition", "Preposition"},
    {"Pronoun", "Pronoun"},
    {"AffixParticle", "Affix / Particle"},
    {"Postposition", "Postposition"},
    {"Unknown", "Missing POS"},
}};

constexpr std::array<const char*, 6> kCanonicalFields = {
    "tajik", "persian", "part-of-speech", "examples", "-queried-word", "-freq"};

std::string fold_key(std::string_view s) {
  const std::string ws = textnorm::canonicalize_whitespace(s);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(ws.data(), static_cast<int32_t>(ws.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string tag_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array() && !v.empty() && v.front().is_string()) return v.front().get<std::string>();
  return {};
}

std::optional<std::string> string_field(const Json& f, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    auto it = f.find(n);
    if (it != f.end() && it->is_string()) return it->get<std::string>();
    if (it != f.end() && it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  }
  return std::nullopt;
}

std::string describe(const textnorm::ValidationReport& r) {
  std::string out;
  char buf[32];
  for (const auto& v : r.violations) {
    std::snprintf(buf, sizeof buf, "%s%zu:U+%04X", out.empty() ? "" : " ", v.index,
                  static_cast<unsigned>(v.codepoint));
    out += buf;
  }
  return out;
}

}  // namespace

const char* pos_name(PosLabel p) { return kPosNames[static_cast<std::size_t>(p)].id; }
const char* pos_display_name(PosLabel p) { return kPosNames[static_cast<std::size_t>(p)].display; }

std::optional<PosLabel> pos_from_name(std::string_view name) {
  for (int i = 0; i < kPosLabelCount; ++i) {
    if (name == kPosNames[static_cast<std::size_t>(i)].id) return static_cast<PosLabel>(i);
  }
  return std::nullopt;
}

PosHarmonizer::PosHarmonizer() { *this = parse(embedded::kPosSynonyms); }

PosHarmonizer PosHarmonizer::parse(std::string_view text) {
  std::unordered_map<std::string, PosLabel> table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorKind::kConfig, "pos synonyms line " + std::to_string(lineno) + ": expected ALIAS<TAB>LABEL");
    }
    std::string label = line.substr(tab + 1);
    while (!label.empty() && (label.back() == '\r' || label.back() == ' ')) label.pop_back();
    auto p = pos_from_name(label);
    if (!p || *p == PosLabel::kUnknown) {
      fail(ErrorKind::kConfig, "pos synonyms line " + std::to_string(lineno) + ": unknown label '" + label + "'");
    }
    table[fold_key(line.substr(0, tab))] = *p;
  }
  // Canonical label names always map to themselves.
  for (int i = 0; i + 1 < kPosLabelCount; ++i) {
    table.emplace(fold_key(kPosNames[static_cast<std::size_t>(i)].id), static_cast<PosLabel>(i));
  }
  return PosHarmonizer(std::move(table));
}

PosHarmonizer PosHarmonizer::from_config(const Config& config) {
  if (auto p = config.get_path("corpus.pos_synonyms")) return parse(read_file(*p));
  return PosHarmonizer();
}

PosLabel PosHarmonizer::harmonize(std::string_view raw_tag) const {
  if (raw_tag.empty()) return PosLabel::kUnknown;
  auto it = table_.find(fold_key(raw_tag));
  return it == table_.end() ? PosLabel::kUnknown : it->second;
}

std::vector<RawRecord> parse_jsonl(std::string_view text) {
  std::vector<RawRecord> out;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    seen.clear();
    std::string duplicate;
    auto cb = [&](int depth, Json::parse_event_t event, Json& parsed) {
      if (event == Json::parse_event_t::key && depth == 1) {
        const auto& key = parsed.get_ref<const std::string&>();
        if (!seen.insert(key).second && duplicate.empty()) {
          for (const char* c : kCanonicalFields)
            if (key == c) duplicate = key;
        }
      }
      return true;
    };
    Json j;
    try {
      j = Json::parse(line, cb);
    } catch (const Json::exception& e) {
      fail(ErrorKind::kParse, "line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    if (!duplicate.empty()) {
      fail(ErrorKind::kParse, "line " + std::to_string(lineno) + ": duplicate field '" + duplicate + "'");
    }
    if (!j.is_object()) fail(ErrorKind::kParse, "line " + std::to_string(lineno) + ": not a JSON object");
    out.push_back({lineno, std::move(j)});
  }
  return out;
}

std::vector<RawRecord> load_jsonl(const std::filesystem::path& path) {
  try {
    return parse_jsonl(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) fail(ErrorKind::kParse, path.string() + ": " + e.what());
    throw;
  }
}

CleanResult clean(std::span<const RawRecord> records, const textnorm::Normalizer& norm,
                  const PosHarmonizer& pos, const CleanOptions& options) {
  CleanResult result;
  const auto& scripts = norm.scripts();
  for (const RawRecord& raw : records) {
    const Json& f = raw.fields;
    auto quarantine = [&](std::string reason, std::string detail = {}) {
      result.quarantined.push_back({raw, std::move(reason), std::move(detail)});
    };
    auto text_of = [&](const char* key, bool& bad_type) -> std::string {
      auto it = f.find(key);
      if (it == f.end() || it->is_null()) return {};
      if (!it->is_string()) {
        bad_type = true;
        return {};
      }
      return it->get<std::string>();
    };
    bool bad_type = false;
    LexiconRecord rec;
    rec.tajik = norm.normalize(text_of("tajik", bad_type));
    rec.persian = norm.normalize(text_of("persian", bad_type));
    if (bad_type) {
      quarantine("schema", "tajik/persian must be strings");
      continue;
    }
    if (rec.tajik.empty()) {
      quarantine("empty-source");
      continue;
    }
    if (rec.persian.empty()) {
      quarantine("empty-target");
      continue;
    }
    if (auto r = textnorm::validate_script(rec.tajik, scripts.tajik, scripts.neutral); !r.passed) {
      quarantine("script-source", describe(r));
      continue;
    }
    if (auto r = textnorm::validate_script(rec.persian, scripts.persian, scripts.neutral); !r.passed) {
      quarantine("script-target", describe(r));
      continue;
    }
    if (const auto n = utf8::length(rec.tajik); n > options.max_length) {
      quarantine("length", "source " + std::to_string(n) + " > " + std::to_string(options.max_length));
      continue;
    }
    if (const auto n = utf8::length(rec.persian); n > options.max_length) {
      quarantine("length", "target " + std::to_string(n) + " > " + std::to_string(options.max_length));
      continue;
    }
    if (auto it = f.find("-freq"); it != f.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        quarantine("schema", "-freq must be a non-negative integer");
        continue;
      }
      rec.freq = it->get<std::uint64_t>();
    }
    if (auto it = f.find("part-of-speech"); it != f.end()) rec.pos = pos.harmonize(tag_text(*it));
    if (auto it = f.find("examples"); it != f.end()) {
      if (it->is_string()) {
        rec.examples.push_back(norm.normalize(it->get<std::string>()));
      } else if (it->is_array()) {
        for (const auto& e : *it)
          if (e.is_string()) rec.examples.push_back(norm.normalize(e.get<std::string>()));
      }
    }
    if (auto q = string_field(f, {"-queried-word"})) rec.queried_word = norm.normalize(*q);
    rec.source_id = string_field(f, {"source_id", "source", "-source"}).value_or("");
    rec.entry_ref = string_field(f, {"entry_ref", "entry", "page"});
    rec.line = raw.line;
    rec.fields = f;
    result.kept.push_back(std::move(rec));
  }
  return result;
}

DedupResult dedup(std::vector<LexiconRecord> records) {
  DedupResult out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (auto& r : records) {
    if (seen.emplace(r.tajik, r.persian, static_cast<int>(r.pos)).second) {
      out.records.push_back(std::move(r));
    } else {
      ++out.removed;
    }
  }
  return out;
}

Json record_to_json(const LexiconRecord& rec) {
  Json j = rec.fields.is_object() ? rec.fields : Json::object();
  j["tajik"] = rec.tajik;
  j["persian"] = rec.persian;
  const std::string raw_pos = j.contains("part-of-speech") ? tag_text(j["part-of-speech"]) : "";
  if (rec.pos == PosLabel::kUnknown) {
    j["part-of-speech"] = nullptr;
  } else {
    j["part-of-speech"] = pos_name(rec.pos);
  }
  if (!raw_pos.empty() && raw_pos != pos_name(rec.pos)) j["-pos-raw"] = raw_pos;
  if (!rec.examples.empty() || j.contains("examples")) j["examples"] = rec.examples;
  if (rec.queried_word) j["-queried-word"] = *rec.queried_word;
  return j;
}

Json quarantine_to_json(const Quarantined& q) {
  Json j = Json::object();
  j["line"] = q.record.line;
  j["reason"] = q.reason;
  if (!q.detail.empty()) j["detail"] = q.detail;
  j["record"] = q.record.fields;
  return j;
}

std::string to_jsonl(std::span<const LexiconRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<LexiconRecord> parse_lexicon(std::string_view text, const PosHarmonizer& pos) {
  std::vector<LexiconRecord> out;
  for (auto& raw : parse_jsonl(text)) {
    const Json& f = raw.fields;
    LexiconRecord rec;
    auto it = f.find("tajik");
    auto jt = f.find("persian");
    if (it == f.end() || jt == f.end() || !it->is_string() || !jt->is_string() ||
        it->get<std::string>().empty() || jt->get<std::string>().empty()) {
      fail(ErrorKind::kParse, "line " + std::to_string(raw.line) + ": lexicon record needs tajik and persian");
    }
    rec.tajik = it->get<std::string>();
    rec.persian = jt->get<std::string>();
    if (auto p = f.find("part-of-speech"); p != f.end()) rec.pos = pos.harmonize(tag_text(*p));
    if (auto e = f.find("examples"); e != f.end() && e->is_array()) {
      for (const auto& x : *e)
        if (x.is_string()) rec.examples.push_back(x.get<std::string>());
    }
    if (auto q = f.find("-freq"); q != f.end() && q->is_number_unsigned()) rec.freq = q->get<std::uint64_t>();
    rec.queried_word = string_field(f, {"-queried-word"});
    rec.source_id = string_field(f, {"source_id", "source", "-source"}).value_or("");
    rec.entry_ref = string_field(f, {"entry_ref", "entry", "page"});
    rec.line = raw.line;
    rec.fields = std::move(raw.fields);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<LexiconRecord> read_lexicon(const std::filesystem::path& path, const PosHarmonizer& pos) {
  try {
    return parse_lexicon(read_file(path), pos);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) fail(ErrorKind::kParse, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace translit::corpus
