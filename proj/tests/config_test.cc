// Copyright 2026 The vidaudit Authors
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


#include "vidaudit/config.h"

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "test_util.h"
#include "vidaudit/errors.h"
#include "vidaudit/hash.h"

namespace vidaudit {
namespace {

TEST(HashTest, StableKnownValues) {
  // splitmix64 of 0 is a published constant.
  EXPECT_EQ(Mix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(HashWords(1, 2, 3), HashCombine(HashCombine(1, 2), 3));
  EXPECT_NE(HashWords(1, 2, 3), HashWords(1, 3, 2));
  EXPECT_EQ(HashString("abc"), HashString("abc"));
  EXPECT_NE(HashString("abc"), HashString("abd"));
}

TEST(HashTest, UnitOpenStaysInside) {
  EXPECT_GT(ToUnitOpen(0), 0.0);
  EXPECT_LT(ToUnitOpen(~0ULL), 1.0);
  double sum = 0;
  for (uint64_t i = 0; i < 100000; ++i) sum += ToUnitOpen(Mix64(i));
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(HashTest, LowBitsAreBalanced) {
  std::set<uint64_t> buckets;
  int ones = 0;
  for (uint64_t i = 0; i < 10000; ++i) {
    const uint64_t h = HashWords(7, i);
    ones += int(h & 1);
    buckets.insert(h % 64);
  }
  EXPECT_NEAR(ones, 5000, 250);
  EXPECT_EQ(buckets.size(), 64u);
}

TEST(ParseKeyValueTest, CommentsBlanksAndWhitespace) {
  const auto kv = ParseKeyValueText(
      "# header\n\n  epsilon = 4.5   # inline\nr_m=0.02\n\tbound.mu = -1\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("epsilon"), "4.5");
  EXPECT_EQ(kv.at("r_m"), "0.02");
  EXPECT_EQ(kv.at("bound.mu"), "-1");
}

TEST(ParseKeyValueTest, ErrorsNameTheLine) {
  try {
    ParseKeyValueText("a = 1\n\nbroken line\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(ParseKeyValueText("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(ParseKeyValueText("bad-key = 1\n"), ConfigError);
  EXPECT_THROW(ParseKeyValueText(" = 1\n"), ConfigError);
  EXPECT_THROW(ParseKeyValueFile("/nonexistent/config.txt"), ConfigError);
}

TEST(ParseValueTest, TypedParsers) {
  EXPECT_DOUBLE_EQ(ParseDouble("k", "1e-3"), 1e-3);
  EXPECT_THROW(ParseDouble("k", "1.0x"), ConfigError);
  EXPECT_THROW(ParseDouble("k", "inf"), ConfigError);
  EXPECT_THROW(ParseDouble("k", ""), ConfigError);
  EXPECT_EQ(ParseInt("k", "-12"), -12);
  EXPECT_THROW(ParseInt("k", "1.5"), ConfigError);
  EXPECT_EQ(ParseUint64("k", "0xff"), 255u);
  EXPECT_EQ(ParseUint64("k", "18446744073709551615"), ~0ULL);
  EXPECT_THROW(ParseUint64("k", "-1"), ConfigError);
  EXPECT_THROW(ParseUint64("k", "0x"), ConfigError);
  EXPECT_TRUE(ParseBool("k", "on"));
  EXPECT_FALSE(ParseBool("k", "false"));
  EXPECT_THROW(ParseBool("k", "maybe"), ConfigError);
}

TEST(AuditConfigTest, DefaultsValidate) {
  const AuditConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_DOUBLE_EQ(cfg.epsilon, 10.0);
  EXPECT_DOUBLE_EQ(cfg.clip_bound, 0.05);
  EXPECT_DOUBLE_EQ(cfg.alpha, 0.01);
  EXPECT_DOUBLE_EQ(cfg.low_prob_bound(), 1.0 / 101);
}

TEST(AuditConfigTest, ValidateRejectsBadFields) {
  auto bad = [](auto mutate) {
    AuditConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.Validate(), ConfigError);
  };
  bad([](AuditConfig& c) { c.epsilon = -1; });
  bad([](AuditConfig& c) { c.r_m = 0; });
  bad([](AuditConfig& c) { c.r_c = 1.5; });
  bad([](AuditConfig& c) { c.r_m = 0.06; c.r_r = 0.06; });
  bad([](AuditConfig& c) { c.clip_bound = -0.1; });
  bad([](AuditConfig& c) { c.beta = 0; });
  bad([](AuditConfig& c) { c.alpha = 1; });
  bad([](AuditConfig& c) { c.num_classes = 1; });
  bad([](AuditConfig& c) { c.perlin.omega = 0; });
}

TEST(AuditConfigTest, ApplyKeysConsumesKnownKeys) {
  auto kv = ParseKeyValueText(
      "epsilon = 4\nH = 0.1\nn_c = 51\nclip = false\nomega = 3\n"
      "noise_seed = 0x10\nsomething.else = 1\n");
  AuditConfig cfg;
  ApplyAuditConfigKeys(kv, cfg);
  EXPECT_DOUBLE_EQ(cfg.epsilon, 4);
  EXPECT_DOUBLE_EQ(cfg.clip_bound, 0.1);
  EXPECT_EQ(cfg.num_classes, 51);
  EXPECT_FALSE(cfg.clip_threshold);
  EXPECT_EQ(cfg.perlin.omega, 3);
  EXPECT_EQ(cfg.noise_seed, 16u);
  ASSERT_EQ(kv.size(), 1u);
  EXPECT_EQ(kv.begin()->first, "something.else");

  auto bad = ParseKeyValueText("alpha = lots\n");
  EXPECT_THROW(ApplyAuditConfigKeys(bad, cfg), ConfigError);
}

TEST(AuditConfigTest, HashTracksEveryField) {
  const AuditConfig base;
  EXPECT_EQ(base.Hash(), AuditConfig{}.Hash());
  EXPECT_EQ(base.Hash().size(), 16u);
  std::set<std::string> hashes = {base.Hash()};
  auto variant = [&](auto mutate) {
    AuditConfig cfg;
    mutate(cfg);
    EXPECT_TRUE(hashes.insert(cfg.Hash()).second);
  };
  variant([](AuditConfig& c) { c.epsilon = 4; });
  variant([](AuditConfig& c) { c.perlin.lambda_t = 3; });
  variant([](AuditConfig& c) { c.r_m = 0.02; });
  variant([](AuditConfig& c) { c.clip_bound = 0.06; });
  variant([](AuditConfig& c) { c.selection_seed = 1; });
  variant([](AuditConfig& c) { c.noise_seed = 1; });
  variant([](AuditConfig& c) { c.postprocess = false; });
  variant([](AuditConfig& c) { c.num_classes = 51; });
  // Perlin seed is per sample and does not enter the hash.
  AuditConfig seeded;
  seeded.perlin.seed = 99;
  EXPECT_EQ(seeded.Hash(), base.Hash());
}

TEST(AuditConfigTest, CanonicalRoundTripsThroughParser) {
  AuditConfig cfg;
  cfg.epsilon = 0.1;
  cfg.r_r = 0.015;
  cfg.selection_seed = 12345678901234ULL;
  cfg.clip_threshold = false;
  auto kv = ParseKeyValueText(cfg.Canonical());
  AuditConfig back;
  ApplyAuditConfigKeys(kv, back);
  EXPECT_TRUE(kv.empty());
  EXPECT_EQ(back.Canonical(), cfg.Canonical());
  EXPECT_EQ(back.Hash(), cfg.Hash());
}

TEST(AuditConfigTest, FileParsing) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "audit.cfg") << "r_c = 0.2\n";
  EXPECT_EQ(ParseKeyValueFile(dir.path() / "audit.cfg").at("r_c"), "0.2");
}

}  // namespace
}  // namespace vidaudit
