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


#include "vidaudit/pipeline.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "test_util.h"
#include "vidaudit/errors.h"
#include "vidaudit/oracle.h"
#include "vidaudit/video_io.h"

namespace vidaudit {
namespace {

using testing::RandomVideo;
using testing::TempDir;

Dataset SmallDataset(size_t n, uint32_t seed = 0) {
  Dataset d;
  for (size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "v%03zu", i);
    d.push_back({id, int(i % 5), RandomVideo({2, 8, 8, 3}, seed + uint32_t(i))});
  }
  return d;
}

std::vector<SampleInfo> Infos(size_t n) { return InfoOf(SmallDataset(n)); }

AuditConfig Ratios(double r_c, double r_r, double r_m) {
  AuditConfig cfg;
  cfg.r_c = r_c;
  cfg.r_r = r_r;
  cfg.r_m = r_m;
  return cfg;
}

PosteriorVector OneHotish(int label, double p, int n) {
  std::vector<double> v(n, (1 - p) / (n - 1));
  v[label] = p;
  return PosteriorVector{v};
}

TEST(SampleIdTest, Validation) {
  EXPECT_NO_THROW(ValidateSampleId("clip_01.a-b"));
  EXPECT_THROW(ValidateSampleId(""), ConfigError);
  EXPECT_THROW(ValidateSampleId("a/b"), ConfigError);
  EXPECT_THROW(ValidateSampleId("a:b"), ConfigError);
}

TEST(ModifyTest, ZeroEpsilonIsIdentity) {
  const Dataset o = SmallDataset(4);
  AuditConfig cfg;
  cfg.epsilon = 0;
  const Dataset q = ModifyDataset(o, cfg);
  for (size_t i = 0; i < o.size(); ++i) EXPECT_EQ(q[i].video, o[i].video);
}

TEST(ModifyTest, PreservesIdsLabelsAndBudget) {
  const Dataset o = SmallDataset(6);
  const AuditConfig cfg;
  const Dataset q = ModifyDataset(o, cfg, 3);
  ASSERT_EQ(q.size(), o.size());
  for (size_t i = 0; i < o.size(); ++i) {
    EXPECT_EQ(q[i].id, o[i].id);
    EXPECT_EQ(q[i].label, o[i].label);
    EXPECT_LE(MaxAbsDiff(q[i].video, o[i].video), 10);
    EXPECT_NE(q[i].video, o[i].video);
    EXPECT_EQ(q[i].video, ModifyVideo(o[i].video, o[i].id, cfg));
  }
}

TEST(ModifyTest, DeterministicAcrossJobCounts) {
  const Dataset o = SmallDataset(8);
  const AuditConfig cfg;
  const Dataset a = ModifyDataset(o, cfg, 1);
  const Dataset b = ModifyDataset(o, cfg, 4);
  for (size_t i = 0; i < o.size(); ++i) EXPECT_EQ(a[i].video, b[i].video);
}

TEST(ModifyTest, SeedsDifferPerSample) {
  EXPECT_NE(SampleNoiseSeed(0, "a"), SampleNoiseSeed(0, "b"));
  EXPECT_NE(SampleNoiseSeed(0, "a"), SampleNoiseSeed(1, "a"));
  EXPECT_EQ(SampleNoiseSeed(5, "a"), SampleNoiseSeed(5, "a"));
}

TEST(ModifyTest, ErrorsNameTheSample) {
  Dataset o = SmallDataset(3);
  o[1].video = VideoTensor();  // empty video: no field can match it
  try {
    ModifyDataset(o, AuditConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("v001"), std::string::npos);
  }
}

TEST(ScoreSamplesTest, SubtractsTrueLabelScores) {
  const Dataset o = SmallDataset(3);
  const Dataset q = ModifyDataset(o, AuditConfig{});
  std::map<std::string, OracleResponse> table;
  const double orig[] = {0.9, 0.5, 0.4}, mod[] = {0.2, 0.5, 0.45};
  for (size_t i = 0; i < 3; ++i) {
    table[QueryId(o[i].id, Variant::kOriginal)] =
        OracleResponse::Full(OneHotish(o[i].label, orig[i], 5));
    table[QueryId(o[i].id, Variant::kModified)] =
        OracleResponse::Full(OneHotish(o[i].label, mod[i], 5));
  }
  const FileOracle oracle(table);
  const std::vector<double> d = ScoreSamples(oracle, o, q, 5, 2);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], 0.7, 1e-15);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_NEAR(d[2], -0.05, 1e-15);
}

TEST(ScoreSamplesTest, FailuresCarryProgress) {
  const Dataset o = SmallDataset(3);
  const Dataset q = ModifyDataset(o, AuditConfig{});
  std::map<std::string, OracleResponse> table;
  table[QueryId("v000", Variant::kOriginal)] =
      OracleResponse::Full(OneHotish(o[0].label, 0.5, 5));
  table[QueryId("v000", Variant::kModified)] =
      OracleResponse::Full(OneHotish(o[0].label, 0.4, 5));
  const FileOracle oracle(table);
  try {
    ScoreSamples(oracle, o, q, 5);
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.completed(), 1u);
  }
  Dataset shuffled = q;
  std::swap(shuffled[0], shuffled[1]);
  EXPECT_THROW(ScoreSamples(oracle, o, shuffled, 5), IntegrityError);
}

TEST(RatioCountTest, ToleratesRepresentationError) {
  EXPECT_EQ(RatioCount(0.01, 1000), 10u);
  EXPECT_EQ(RatioCount(0.07, 100), 7u);  // 0.07 * 100 = 7.000000000000001
  EXPECT_EQ(RatioCount(0.29, 100), 29u);  // 0.29 * 100 = 28.999999999999996
  EXPECT_EQ(RatioCount(0.015, 100), 1u);
}

TEST(SelectSetsTest, Counts) {
  const auto infos = Infos(100);
  std::vector<double> delta(100);
  for (size_t i = 0; i < delta.size(); ++i) delta[i] = std::sin(double(i));
  const DatasetManifest m = SelectSets(delta, infos, Ratios(0.10, 0.03, 0.02));
  const SetCounts c = m.Counts();
  EXPECT_EQ(c.candidates, 10u);
  EXPECT_EQ(c.reference, 3u);
  EXPECT_EQ(c.modification, 2u);
  EXPECT_EQ(c.remaining, 95u);
}

TEST(SelectSetsTest, CandidatesAreTopDelta) {
  const auto infos = Infos(4);
  const std::vector<double> delta = {0.9, 0.1, 0.5, 0.2};
  const DatasetManifest m = SelectSets(delta, infos, Ratios(0.5, 0.25, 0.25));
  std::set<std::string> candidates;
  for (const auto& e : m.entries) {
    if (e.candidate) candidates.insert(e.id);
  }
  EXPECT_EQ(candidates, (std::set<std::string>{"v000", "v002"}));
  EXPECT_EQ(m.Find("v000")->delta_m, 0.9);
}

TEST(SelectSetsTest, TiesBreakByAscendingId) {
  const auto infos = Infos(6);
  const std::vector<double> delta(6, 0.3);
  const DatasetManifest m = SelectSets(delta, infos, Ratios(0.5, 1.0 / 6, 1.0 / 6));
  std::vector<std::string> candidates;
  for (const auto& e : m.entries) {
    if (e.candidate) candidates.push_back(e.id);
  }
  std::sort(candidates.begin(), candidates.end());
  EXPECT_EQ(candidates, (std::vector<std::string>{"v000", "v001", "v002"}));
}

TEST(SelectSetsTest, DisjointAndWithinCandidatesForManySeeds) {
  const auto infos = Infos(50);
  std::vector<double> delta(50);
  for (size_t i = 0; i < delta.size(); ++i) delta[i] = std::cos(3.0 * i);
  std::set<std::vector<std::string>> distinct_refs;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    AuditConfig cfg = Ratios(0.2, 0.1, 0.06);
    cfg.selection_seed = seed;
    const DatasetManifest m = SelectSets(seed % 2 ? delta : std::vector<double>{},
                                         infos, cfg);
    const auto ref = m.IdsOf(Assignment::kReference);
    const auto mod = m.IdsOf(Assignment::kModification);
    ASSERT_EQ(ref.size(), 5u);
    ASSERT_EQ(mod.size(), 3u);
    for (const auto& id : mod) {
      ASSERT_FALSE(std::binary_search(ref.begin(), ref.end(), id));
    }
    for (const auto& e : m.entries) {
      if (e.assignment != Assignment::kRemaining) ASSERT_TRUE(e.candidate);
    }
    distinct_refs.insert(ref);
  }
  EXPECT_GT(distinct_refs.size(), 100u);
}

TEST(SelectSetsTest, Deterministic) {
  const auto infos = Infos(30);
  AuditConfig cfg = Ratios(0.5, 0.2, 0.2);
  cfg.selection_seed = 77;
  const auto a = SelectSets({}, infos, cfg).ToJson();
  const auto b = SelectSets({}, infos, cfg).ToJson();
  EXPECT_EQ(a, b);
  cfg.selection_seed = 78;
  EXPECT_NE(SelectSets({}, infos, cfg).ToJson(), a);
}

TEST(SelectSetsTest, RejectsVacuousOrInconsistentInput) {
  const auto infos = Infos(10);
  EXPECT_THROW(SelectSets({}, infos, Ratios(0.5, 0.05, 0.2)), ConfigError);
  EXPECT_THROW(SelectSets({}, infos, Ratios(0.5, 0.2, 0.05)), ConfigError);
  EXPECT_THROW(SelectSets(std::vector<double>(3), infos, Ratios(0.5, 0.2, 0.2)),
               ConfigError);
  std::vector<SampleInfo> dup = infos;
  dup[1].id = dup[0].id;
  EXPECT_THROW(SelectSets({}, dup, Ratios(0.5, 0.2, 0.2)), ConfigError);
}

TEST(ManifestTest, JsonRoundTrip) {
  const auto infos = Infos(20);
  std::vector<double> delta(20);
  for (size_t i = 0; i < delta.size(); ++i) delta[i] = 0.01 * i;
  AuditConfig cfg = Ratios(0.5, 0.2, 0.2);
  const DatasetManifest m = SelectSets(delta, infos, cfg);
  EXPECT_EQ(m.config_hash, cfg.Hash());
  const DatasetManifest back = DatasetManifest::FromJson(m.ToJson());
  EXPECT_EQ(back.ToJson(), m.ToJson());
  EXPECT_EQ(m.ToJson()["entries"][0].count("noise_seed"), 1u);
  EXPECT_EQ(m.Find("v003")->noise_seed, SampleNoiseSeed(cfg.noise_seed, "v003"));
  TempDir dir;
  m.Write(dir.path() / "manifest.json");
  EXPECT_EQ(DatasetManifest::Read(dir.path() / "manifest.json").ToJson(),
            m.ToJson());
}

TEST(ManifestTest, MalformedJsonIsFormatError) {
  EXPECT_THROW(DatasetManifest::FromJson(nlohmann::json::array()), FormatError);
  EXPECT_THROW(DatasetManifest::FromJson(nlohmann::json::parse(
                   R"({"config_hash":"x","entries":[{"id":"a"}]})")),
               FormatError);
  EXPECT_THROW(
      DatasetManifest::FromJson(nlohmann::json::parse(
          R"({"config_hash":"x","entries":[{"id":"a","label":0,
              "assignment":"nowhere","candidate":false,"delta_m":null,
              "noise_seed":0}]})")),
      FormatError);
  EXPECT_THROW(DatasetManifest::Read("/nonexistent/manifest.json"),
               FormatError);
}

TEST(BuildPairTest, Complementarity) {
  const Dataset o = SmallDataset(20);
  const AuditConfig cfg = Ratios(0.5, 0.2, 0.2);
  const Dataset q = ModifyDataset(o, cfg);
  const DatasetManifest m = SelectSets({}, InfoOf(o), cfg);
  const DatasetPair pair = BuildPair(o, q, m);
  ASSERT_EQ(pair.entries.size(), o.size());
  size_t modified_published = 0;
  for (const PairEntry& e : pair.entries) {
    const size_t i = size_t(std::stoi(e.id.substr(1)));
    EXPECT_NE(e.published, e.unpublished);
    if (e.assignment == Assignment::kModification) {
      EXPECT_EQ(e.published, q[i].video);
      EXPECT_EQ(e.unpublished, o[i].video);
      ++modified_published;
    } else {
      EXPECT_EQ(e.published, o[i].video);
      EXPECT_EQ(e.unpublished, q[i].video);
    }
    EXPECT_EQ(e.variant(Variant::kOriginal), o[i].video);
    EXPECT_EQ(e.variant(Variant::kModified), q[i].video);
  }
  EXPECT_EQ(modified_published, RatioCount(cfg.r_m, o.size()));
  EXPECT_EQ(pair.Published().size(), o.size());
}

TEST(BuildPairTest, MissingSampleIsIntegrityError) {
  const Dataset o = SmallDataset(10);
  const AuditConfig cfg = Ratios(0.5, 0.2, 0.2);
  const Dataset q = ModifyDataset(o, cfg);
  const DatasetManifest m = SelectSets({}, InfoOf(o), cfg);
  Dataset short_q(q.begin(), q.end() - 1);
  EXPECT_THROW(BuildPair(o, short_q, m), IntegrityError);
  Dataset relabeled = q;
  relabeled[0].label += 1;
  EXPECT_THROW(BuildPair(o, relabeled, m), IntegrityError);
}

TEST(DatasetDirTest, RoundTripAndLoadPair) {
  const Dataset o = SmallDataset(10);
  const AuditConfig cfg = Ratios(0.5, 0.2, 0.2);
  const Dataset q = ModifyDataset(o, cfg);
  const DatasetManifest m = SelectSets({}, InfoOf(o), cfg);
  const DatasetPair pair = BuildPair(o, q, m);
  TempDir dir;
  WriteDatasetDir(dir.path() / "O", o);
  const Dataset back = ReadDatasetDir(dir.path() / "O");
  ASSERT_EQ(back.size(), o.size());
  for (size_t i = 0; i < o.size(); ++i) {
    EXPECT_EQ(back[i].id, o[i].id);
    EXPECT_EQ(back[i].label, o[i].label);
    EXPECT_EQ(back[i].video, o[i].video);
  }
  WriteDatasetDir(dir.path() / "D", pair.Published());
  WriteDatasetDir(dir.path() / "U", pair.Unpublished());
  const DatasetPair loaded = LoadPair(dir.path() / "D", dir.path() / "U", m);
  for (size_t i = 0; i < pair.entries.size(); ++i) {
    EXPECT_EQ(loaded.entries[i].published, pair.entries[i].published);
    EXPECT_EQ(loaded.entries[i].unpublished, pair.entries[i].unpublished);
  }
  std::filesystem::remove(dir.path() / "U" / "v004.vtr");
  EXPECT_THROW(LoadPair(dir.path() / "D", dir.path() / "U", m), Error);
  EXPECT_THROW(ReadDatasetDir(dir.path() / "nope"), Error);
}

}  // namespace
}  // namespace vidaudit
