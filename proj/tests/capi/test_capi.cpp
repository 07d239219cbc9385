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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "translit/translit.h"

namespace fs = std::filesystem;

namespace {

class Scratch {
 public:
  explicit Scratch(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("tl_capi_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Scratch() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(TL_TEST_CLI) + " " + args + " >" + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct Ctx {
  tl_context* c = nullptr;
  Ctx() { EXPECT_EQ(tl_context_new(nullptr, &c), TL_OK); }
  ~Ctx() { tl_context_free(c); }
};

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_NE(std::string(tl_version()), "");
  EXPECT_STREQ(tl_status_name(TL_OK), "ok");
  EXPECT_STREQ(tl_status_name(TL_ERR_NOT_FOUND), "not-found");
  EXPECT_STREQ(tl_status_name(TL_ERR_CONFIG), "config");
}

TEST(CApi, ContextSetGet) {
  Ctx ctx;
  const char* v = nullptr;
  ASSERT_EQ(tl_context_get(ctx.c, "decode.beam", &v), TL_OK);
  EXPECT_STREQ(v, "3");
  ASSERT_EQ(tl_context_set(ctx.c, "decode.beam", "5"), TL_OK);
  ASSERT_EQ(tl_context_get(ctx.c, "decode.beam", &v), TL_OK);
  EXPECT_STREQ(v, "5");
  EXPECT_EQ(tl_context_set(ctx.c, "decode.nonsense", "1"), TL_ERR_CONFIG);
  EXPECT_NE(std::string(tl_last_error()), "");
  EXPECT_STREQ(tl_context_result(ctx.c), "{}");
  tl_decode_options o{};
  ASSERT_EQ(tl_decode_options_init(ctx.c, &o), TL_OK);
  EXPECT_EQ(o.beam, 5u);
  EXPECT_DOUBLE_EQ(o.alpha, 0.6);
}

TEST(CApi, NullArguments) {
  tl_context* c = nullptr;
  EXPECT_EQ(tl_context_new(nullptr, nullptr), TL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(tl_context_new("/nonexistent/config.ini", &c), TL_ERR_NOT_FOUND);
  size_t d = 0;
  EXPECT_EQ(tl_levenshtein(nullptr, "a", &d), TL_ERR_INVALID_ARGUMENT);
  tl_context_free(nullptr);
}

TEST(CApi, Metrics) {
  size_t d = 0;
  ASSERT_EQ(tl_levenshtein("kitten", "sitting", &d), TL_OK);
  EXPECT_EQ(d, 3u);
  ASSERT_EQ(tl_levenshtein("کتاب", "کتب", &d), TL_OK);
  EXPECT_EQ(d, 1u);
  double cer = 0;
  ASSERT_EQ(tl_cer("کتب", "کتاب", &cer), TL_OK);
  EXPECT_DOUBLE_EQ(cer, 0.25);
  double chrf = 0;
  ASSERT_EQ(tl_chrf_pp("abc", "abc", &chrf), TL_OK);
  EXPECT_NEAR(chrf, 100.0, 1e-9);
  EXPECT_EQ(tl_cer("a", "\xff", &cer), TL_ERR_PARSE);
}

TEST(CApi, PipelineAndInference) {
  Scratch d("pipe");
  Ctx ctx;
  for (auto [k, v] : {std::pair{"transformer.layers", "1"}, {"transformer.d_model", "16"}, {"transformer.heads", "2"},
                      {"transformer.d_ff", "16"}, {"train.max_epochs", "1"}, {"train.patience", "1"}})
    ASSERT_EQ(tl_context_set(ctx.c, k, v), TL_OK) << k;
  ASSERT_EQ(tl_synth(ctx.c, "cipher", 40, 3, (d / "raw.jsonl").c_str()), TL_OK) << tl_last_error();
  ASSERT_EQ(tl_prepare(ctx.c, (d / "raw.jsonl").c_str(), (d / "prep").c_str()), TL_OK) << tl_last_error();
  EXPECT_NE(std::string(tl_context_result(ctx.c)).find("\"kept\""), std::string::npos);
  ASSERT_EQ(tl_split(ctx.c, (d / "prep/cleaned.jsonl").c_str(), (d / "splits").c_str(), nullptr), TL_OK)
      << tl_last_error();
  tl_split_options bad{};
  bad.has_ratios = 1;
  bad.ratios[0] = 0.5;
  bad.ratios[1] = 0.1;
  bad.ratios[2] = 0.1;
  EXPECT_EQ(tl_split(ctx.c, (d / "prep/cleaned.jsonl").c_str(), (d / "bad").c_str(), &bad),
            TL_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(tl_train(ctx.c, "transformer", (d / "splits").c_str(), (d / "model").c_str(), nullptr, nullptr), TL_OK)
      << tl_last_error();
  EXPECT_NE(tl_train(ctx.c, "gru", (d / "splits").c_str(), (d / "m2").c_str(), nullptr, nullptr), TL_OK);

  tl_model* m = nullptr;
  ASSERT_EQ(tl_model_load(ctx.c, (d / "model/best.ckpt").c_str(), &m), TL_OK) << tl_last_error();
  const char* info = nullptr;
  ASSERT_EQ(tl_model_info(m, &info), TL_OK);
  EXPECT_NE(std::string(info).find("transformer"), std::string::npos);
  tl_decode_options o{};
  tl_decode_options_init(ctx.c, &o);
  o.max_len = 10;
  const char* text = nullptr;
  double score = 0;
  ASSERT_EQ(tl_model_transliterate(m, "аб", &o, &text, &score), TL_OK) << tl_last_error();
  EXPECT_TRUE(std::isfinite(score));
  EXPECT_LE(score, 0.0);
  tl_model_free(m);

  tl_rules* r = nullptr;
  ASSERT_EQ(tl_rules_load(ctx.c, (d / "splits/train.jsonl").c_str(), &r), TL_OK) << tl_last_error();
  ASSERT_EQ(tl_rules_transliterate(r, "аб", &text), TL_OK);
  EXPECT_NE(std::string(text), "");
  tl_rules_free(r);

  tl_system sys[] = {{TL_SYSTEM_RULES, nullptr}};
  const std::string lex = d / "splits/train.jsonl";
  sys[0].path = lex.c_str();
  tl_evaluate_options eo{};
  ASSERT_EQ(tl_evaluate_options_init(ctx.c, &eo), TL_OK);
  const std::string test = d / "splits/test.jsonl", out = d / "eval";
  eo.test = test.c_str();
  eo.systems = sys;
  eo.num_systems = 1;
  eo.out_dir = out.c_str();
  ASSERT_EQ(tl_evaluate(ctx.c, &eo), TL_OK) << tl_last_error();
  EXPECT_TRUE(fs::exists(d / "eval/table_models.txt"));
  eo.num_systems = 0;
  EXPECT_EQ(tl_evaluate(ctx.c, &eo), TL_ERR_CONFIG);
}

TEST(CApi, MissingInputIsNotFound) {
  Scratch d("missing");
  Ctx ctx;
  EXPECT_EQ(tl_prepare(ctx.c, (d / "absent.jsonl").c_str(), (d / "out").c_str()), TL_ERR_NOT_FOUND);
  EXPECT_NE(std::string(tl_last_error()).find("absent.jsonl"), std::string::npos);
}

TEST(Cli, ExitCodesAndReproducibility) {
  Scratch d("cli");
  const std::string log = d / "log.txt";
  EXPECT_EQ(run_cli("--version", log), 0);
  EXPECT_EQ(run_cli("", log), 2);
  EXPECT_EQ(run_cli("synth --count 30 --out " + (d / "raw.jsonl"), log), 0) << read_file(log);
  EXPECT_EQ(run_cli("prepare --input " + (d / "raw.jsonl") + " --out " + (d / "p1"), log), 0) << read_file(log);
  EXPECT_EQ(run_cli("-q prepare --input " + (d / "raw.jsonl") + " --out " + (d / "p2"), log), 0);
  EXPECT_EQ(read_file(d / "p1/cleaned.jsonl"), read_file(d / "p2/cleaned.jsonl"));
  EXPECT_EQ(run_cli("split --input " + (d / "p1/cleaned.jsonl") + " --out " + (d / "s1"), log), 0);
  EXPECT_EQ(run_cli("split --seed 42 --input " + (d / "p1/cleaned.jsonl") + " --out " + (d / "s2"), log), 0);
  EXPECT_EQ(read_file(d / "s1/split_manifest.json"), read_file(d / "s2/split_manifest.json"));

  EXPECT_EQ(run_cli("prepare --input " + (d / "nothere.jsonl") + " --out " + (d / "p3"), log), 2);
  EXPECT_NE(read_file(log).find("nothere.jsonl"), std::string::npos);
  EXPECT_EQ(run_cli("train --arch gru --splits " + (d / "s1") + " --out " + (d / "m"), log), 2);
  EXPECT_EQ(run_cli("--set decode.bogus=1 synth --out " + (d / "x.jsonl"), log), 2);
  EXPECT_EQ(run_cli("split --ratios 0.5,0.5 --input " + (d / "p1/cleaned.jsonl") + " --out " + (d / "s3"), log), 2);

  EXPECT_EQ(run_cli("--json -q translit --rules --lexicon " + (d / "s1/train.jsonl") + " --in " +
                        (d / "p1/cleaned.jsonl") + " --out " + (d / "t.tsv"),
                    log),
            0)
      << read_file(log);
  EXPECT_NE(read_file(log).find("\"inputs\""), std::string::npos);
}
