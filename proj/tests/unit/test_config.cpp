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
#include "test_util.hpp"

using namespace translit;

TEST(Config, DefaultsAreLoaded) {
  Config c;
  EXPECT_EQ(c.get_int("train.max_epochs"), 20);
  EXPECT_EQ(c.get_int("train.patience"), 5);
  EXPECT_DOUBLE_EQ(c.get_double("decode.alpha"), 0.6);
  EXPECT_EQ(c.get_doubles("split.ratios"), (std::vector<double>{0.8, 0.1, 0.1}));
  EXPECT_FALSE(c.get_bool("eval.strip_diacritics"));
  EXPECT_FALSE(c.get_path("rules.charmap").has_value());  // built-in copy
}

TEST(Config, LayeringAndUnknownKeys) {
  auto c = Config::from_string("[train]\nmax_epochs = 7\n");
  EXPECT_EQ(c.get_int("train.max_epochs"), 7);
  EXPECT_EQ(c.get_int("train.patience"), 5);
  EXPECT_THROW(Config::from_string("[train]\nmax_epoch = 7\n"), Error);
  EXPECT_THROW(c.set("nope.key", "1"), Error);
}

TEST(Config, TypedAccessErrors) {
  Config c;
  c.set("train.max_epochs", "abc");
  try {
    c.get_int("train.max_epochs");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(Config, HashTracksContent) {
  Config a, b;
  EXPECT_EQ(a.hash(), b.hash());
  b.set("train.seed", "7");
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, RelativePathsResolveAgainstFile) {
  tltest::TempDir dir("cfg");
  tltest::spit(dir / "my.ini", "[rules]\ncharmap = maps/cm.tsv\n");
  auto c = Config::load(dir / "my.ini");
  auto p = c.get_path("rules.charmap");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->lexically_normal(), (dir.path() / "maps/cm.tsv").lexically_normal());
}
