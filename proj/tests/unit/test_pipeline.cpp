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

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "config/config.hpp"
#include "json.hpp"
#include "pipeline/pipeline.hpp"
#include "table_check.hpp"
#include "test_util.hpp"

using namespace translit;
using namespace translit::pipeline;
using Json = nlohmann::ordered_json;

namespace {

Config tiny_config() {
  return Config::from_string(
      "[transformer]\nlayers = 1\nd_model = 16\nheads = 2\nd_ff = 32\nmax_len = 40\n"
      "[bilstm]\nembedding_dim = 8\nhidden_size = 8\ndecoder_hidden = 8\nattention_dim = 8\nmax_len = 40\n"
      "[train]\nmax_epochs = 2\npatience = 2\nbatch_size = 16\nlr = 3e-3\n"
      "[decode]\nmax_len = 20\n[eval]\nwarmup = 2\n");
}

Json manifest_without_times(const std::filesystem::path& p) {
  auto j = Json::parse(tltest::slurp(p));
  j.erase("started");
  j.erase("finished");
  return j;
}

}  // namespace

TEST(Pipeline, EndToEnd) {
  tltest::TempDir d("pipe");
  const Config cfg = tiny_config();
  synth(cfg, {"cipher", 80, 42, d / "raw.jsonl"});

  auto prep = prepare(cfg, {d / "raw.jsonl", d / "prep"});
  EXPECT_EQ(prep["kept"].get<std::size_t>(), 80u);
  for (const char* f : {"cleaned.jsonl", "quarantine.jsonl", "stats.json", "pos_table.txt", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(d / "prep" / f)) << f;

  auto sp = split(cfg, {d / "prep/cleaned.jsonl", d / "splits", std::nullopt, std::nullopt});
  EXPECT_EQ(sp["sizes"], Json::parse("[64, 8, 8]"));
  auto sp2 = split(cfg, {d / "prep/cleaned.jsonl", d / "splits2", std::nullopt, std::nullopt});
  EXPECT_EQ(tltest::slurp(d / "splits/split_manifest.json"), tltest::slurp(d / "splits2/split_manifest.json"));
  EXPECT_EQ(tltest::slurp(d / "splits/train.jsonl"), tltest::slurp(d / "splits2/train.jsonl"));
  split(cfg, {d / "prep/cleaned.jsonl", d / "splits3", 7, std::nullopt});
  EXPECT_NE(tltest::slurp(d / "splits/split_manifest.json"), tltest::slurp(d / "splits3/split_manifest.json"));

  auto tr = train(cfg, {"transformer", d / "splits", d / "model", std::nullopt, std::nullopt});
  EXPECT_EQ(tr["epochs"].get<std::size_t>(), 2u);
  for (const char* f : {"best.ckpt", "last.ckpt", "history.json", "timing.json", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(d / "model" / f)) << f;
  auto hist = Json::parse(tltest::slurp(d / "model/history.json"));
  EXPECT_EQ(hist["epochs"].size(), 2u);

  tltest::spit(d / "words.txt", "аб\nсалом\n\n");
  TranslitRequest tq;
  tq.model = d / "model/best.ckpt";
  tq.decode.mode = "beam";
  tq.decode.nbest = 2;
  tq.decode.max_len = 20;
  tq.in = d / "words.txt";
  tq.out = d / "out.tsv";
  pipeline::translit(cfg, tq);
  const auto tsv = tltest::slurp(d / "out.tsv");
  EXPECT_NE(tsv.find("салом\t"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(d / "out.tsv.manifest.json"));

  TranslitRequest rq;
  rq.rules = true;
  rq.lexicon = d / "splits/train.jsonl";
  rq.in = d / "words.txt";
  rq.out = d / "rules.tsv";
  pipeline::translit(cfg, rq);

  EvaluateRequest eq;
  eq.test = d / "splits/test.jsonl";
  eq.systems = {{System::kRules, d / "splits/train.jsonl"}, {System::kModel, d / "model/best.ckpt"}};
  eq.decode = "both";
  eq.max_len = 20;
  eq.beam_sweep = {1, 3};
  eq.warmup = 1;
  eq.out_dir = d / "eval";
  evaluate(cfg, eq);
  for (const char* f : {"table_models.txt", "table_pos.txt", "table_beam.txt", "tables.txt", "report.json",
                        "manifest.json", "predictions_1.tsv"})
    EXPECT_TRUE(std::filesystem::exists(d / "eval" / f)) << f;
  auto models = tltest::parse_table(tltest::slurp(d / "eval/table_models.txt"));
  ASSERT_TRUE(models.well_formed);
  ASSERT_EQ(models.rows.size(), 3u);
  EXPECT_EQ(models.rows[0][0], "Rule-based (dict.)");
  EXPECT_EQ(models.rows[1][0], "Transf. (greedy)");
  EXPECT_EQ(models.rows[2][0], "Transf. (beam 3)");
  auto beam = tltest::parse_table(tltest::slurp(d / "eval/table_beam.txt"));
  ASSERT_TRUE(beam.well_formed);
  EXPECT_EQ(beam.rows.size(), 2u);

  // Identity predictions score perfectly.
  std::string ident;
  {
    const auto test = tltest::slurp(d / "splits/test.jsonl");
    std::size_t pos = 0;
    while (pos < test.size()) {
      auto nl = test.find('\n', pos);
      auto j = Json::parse(test.substr(pos, nl - pos));
      ident += j["tajik"].get<std::string>() + "\t" + j["persian"].get<std::string>() + "\t\n";
      pos = nl + 1;
    }
  }
  tltest::spit(d / "ident.tsv", ident);
  EvaluateRequest iq;
  iq.test = d / "splits/test.jsonl";
  iq.systems = {{System::kPredictions, d / "ident.tsv"}};
  iq.out_dir = d / "eval_ident";
  evaluate(cfg, iq);
  auto ident_table = tltest::parse_table(tltest::slurp(d / "eval_ident/table_models.txt"));
  ASSERT_TRUE(ident_table.well_formed);
  ASSERT_EQ(ident_table.rows.size(), 1u);
  EXPECT_EQ(ident_table.rows[0][1], "0.0000");
  EXPECT_EQ(ident_table.rows[0][2], "1.0000");
}

TEST(Pipeline, PrepareIsReproducible) {
  tltest::TempDir d("rerun");
  const Config cfg = tiny_config();
  synth(cfg, {"cipher", 30, 1, d / "raw.jsonl"});
  prepare(cfg, {d / "raw.jsonl", d / "a"});
  prepare(cfg, {d / "raw.jsonl", d / "b"});
  for (const char* f : {"cleaned.jsonl", "quarantine.jsonl", "stats.json", "pos_table.txt"})
    EXPECT_EQ(tltest::slurp(d / "a" / f), tltest::slurp(d / "b" / f)) << f;
  auto ma = manifest_without_times(d / "a/manifest.json");
  auto mb = manifest_without_times(d / "b/manifest.json");
  EXPECT_EQ(ma["config_hash"], mb["config_hash"]);
}

TEST(Pipeline, MissingInputNamesPath) {
  tltest::TempDir d("missing");
  try {
    prepare(Config(), {d / "nope.jsonl", d / "out"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
    EXPECT_NE(std::string(e.what()).find("nope.jsonl"), std::string::npos);
  }
}

TEST(Pipeline, InvalidArch) {
  tltest::TempDir d("arch");
  EXPECT_THROW(train(Config(), {"gru", d.path(), d / "m", std::nullopt, std::nullopt}), Error);
}
