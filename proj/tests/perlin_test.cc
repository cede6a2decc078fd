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


#include "vidaudit/perlin.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.h"
#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

TEST(FadeTest, EndpointsAreExact) {
  EXPECT_EQ(Fade(0.0), 0.0);
  EXPECT_EQ(Fade(1.0), 1.0);
  EXPECT_EQ(Fade(0.5), 0.5);
}

TEST(FadeTest, MatchesMonomialFormAndIsMonotone) {
  double prev = -1;
  for (int i = 0; i <= 10000; ++i) {
    const double s = i / 10000.0;
    const double f = Fade(s);
    ASSERT_NEAR(f, testing::NaiveFade(s), 1e-14);
    ASSERT_GE(f, prev);
    prev = f;
  }
}

TEST(FadeTest, FirstAndSecondDerivativesVanishAtEnds) {
  const double h = 1e-4;
  for (double s : {0.0, 1.0}) {
    const double lo = s == 0.0 ? 0.0 : 1.0 - 2 * h;
    const double d1 = (Fade(lo + 2 * h) - Fade(lo)) / (2 * h);
    EXPECT_NEAR(d1, 0.0, 1e-6);
    const double d2 =
        (Fade(lo + 2 * h) - 2 * Fade(lo + h) + Fade(lo)) / (h * h);
    EXPECT_NEAR(d2, 0.0, 1e-2);
  }
  // 30 s^2 (s - 1)^2 at the midpoint.
  EXPECT_NEAR((Fade(0.5 + 1e-6) - Fade(0.5 - 1e-6)) / 2e-6, 1.875, 1e-6);
}

TEST(FadeTest, RejectsOutOfRange) {
  EXPECT_THROW(Fade(-0.01), DomainError);
  EXPECT_THROW(Fade(1.01), DomainError);
  EXPECT_THROW(Fade(std::nan("")), DomainError);
}

TEST(GradientTest, UnitNormAndIsotropic) {
  double mean[3] = {0, 0, 0};
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vec3 g = GradientAt(i % 37, i / 37, i % 11 - 5, 42);
    ASSERT_NEAR(std::hypot(g[0], g[1], g[2]), 1.0, 1e-12);
    for (int a = 0; a < 3; ++a) mean[a] += g[a] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.0, 0.02);
}

TEST(GradientTest, DeterministicAndSeedDependent) {
  EXPECT_EQ(GradientAt(3, -4, 5, 9), GradientAt(3, -4, 5, 9));
  EXPECT_NE(GradientAt(3, -4, 5, 9), GradientAt(3, -4, 5, 10));
  EXPECT_NE(GradientAt(3, -4, 5, 9), GradientAt(-4, 3, 5, 9));
}

TEST(PerlinTest, ZeroAtLatticePoints) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int64_t> coord(-100000, 100000);
  for (int i = 0; i < 1000; ++i) {
    const double x = double(coord(rng)), y = double(coord(rng)),
                 t = double(coord(rng));
    ASSERT_LT(std::abs(PerlinValue(x, y, t, rng())), 1e-12);
  }
}

TEST(PerlinTest, StubGradientOnCornerCell) {
  // Only the (0,0,0) corner carries a gradient, along +x. At (u, v, w) the
  // value is fade(1-u) fade(1-v) fade(1-w) u.
  auto grad = [](int64_t i, int64_t j, int64_t k) -> Vec3 {
    if (i == 0 && j == 0 && k == 0) return {1, 0, 0};
    return {0, 0, 0};
  };
  const double u = 0.25, v = 0.5, w = 0.75;
  const double want = testing::NaiveFade(0.75) * 0.5 *
                      testing::NaiveFade(0.25) * u;
  EXPECT_NEAR(PerlinValueWith(u, v, w, grad), want, 1e-15);
}

TEST(PerlinTest, MatchesCornerSumOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> coord(-20, 20);
  for (int i = 0; i < 2000; ++i) {
    const double x = coord(rng), y = coord(rng), t = coord(rng);
    auto grad = [](int64_t a, int64_t b, int64_t c) {
      return GradientAt(a, b, c, 77);
    };
    ASSERT_NEAR(PerlinValue(x, y, t, 77),
                testing::NaivePerlin(x, y, t, grad), 1e-12);
  }
}

TEST(PerlinTest, ContinuousAcrossCellBoundaries) {
  for (int i = 0; i < 200; ++i) {
    const double y = 0.37 * i, t = 0.11 * i;
    const double x = 3.0;
    EXPECT_NEAR(PerlinValue(x - 1e-9, y, t, 5), PerlinValue(x + 1e-9, y, t, 5),
                1e-7);
  }
}

TEST(PerlinTest, BoundedBySqrtThree) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-50, 50);
  for (int i = 0; i < 20000; ++i) {
    ASSERT_LE(std::abs(PerlinValue(coord(rng), coord(rng), coord(rng), 8)),
              std::sqrt(3.0));
  }
}

TEST(FractalTest, SingleOctaveReducesToScaledPerlin) {
  PerlinParams p;
  p.omega = 1;
  p.seed = 11;
  const double x = 5.5, y = 9.25, t = 2.0;
  EXPECT_DOUBLE_EQ(Fractal(x, y, t, p),
                   0.5 * PerlinValue(x / p.lambda_x, y / p.lambda_y,
                                     t / p.lambda_t, OctaveSeed(11, 1)));
}

TEST(FractalTest, StubOctavesAreWeightedByHalfPowers) {
  PerlinParams p;
  p.omega = 2;
  const double s = FractalWith(1, 2, 3, p, [](int n, double, double, double) {
    return n == 1 ? 0.3 : -0.2;
  });
  EXPECT_NEAR(s, 0.10, 1e-15);
}

TEST(FractalTest, OctaveCoordinatesDoubleEachOctave) {
  PerlinParams p;
  p.omega = 3;
  p.lambda_x = 4;
  p.lambda_y = 2;
  p.lambda_t = 8;
  FractalWith(8, 8, 8, p, [&](int n, double x, double y, double t) {
    const double f = std::ldexp(1.0, n - 1);
    EXPECT_DOUBLE_EQ(x, f * 2);
    EXPECT_DOUBLE_EQ(y, f * 4);
    EXPECT_DOUBLE_EQ(t, f * 1);
    return 0.0;
  });
}

TEST(FractalTest, AmplitudeBound) {
  PerlinParams p;
  p.omega = 4;
  p.lambda_x = p.lambda_y = p.lambda_t = 3.0;
  const double bound = std::sqrt(3.0) * (1 - std::ldexp(1.0, -p.omega));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(0, 100);
  for (int i = 0; i < 5000; ++i) {
    ASSERT_LE(std::abs(Fractal(coord(rng), coord(rng), coord(rng), p)), bound);
  }
}

TEST(SineTransformTest, KnownValues) {
  EXPECT_NEAR(SineTransform(0.25, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(SineTransform(0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(SineTransform(0.125, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(SineTransform(-0.25, 1.0), -1.0, 1e-15);
}

TEST(PerlinParamsTest, Validate) {
  PerlinParams p;
  EXPECT_NO_THROW(p.Validate());
  p.omega = 0;
  EXPECT_THROW(p.Validate(), DomainError);
  p = {};
  p.lambda_t = 0;
  EXPECT_THROW(p.Validate(), DomainError);
  p = {};
  p.phi_sine = -1;
  EXPECT_THROW(p.Validate(), DomainError);
}

TEST(GenerateFieldTest, NormalizedToUnitRange) {
  PerlinParams p;
  p.seed = 3;
  const NoiseField f = GenerateField(8, 32, 32, p);
  double lo = 1, hi = 0;
  for (double v : f.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_DOUBLE_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 1.0);
}

TEST(GenerateFieldTest, VoxelMappingMatchesFractal) {
  PerlinParams p;
  p.seed = 4;
  p.lambda_x = 5;
  p.lambda_y = 7;
  p.lambda_t = 3;
  const int t = 3, h = 6, w = 9;
  const NoiseField f = GenerateField(t, h, w, p);
  std::vector<double> raw;
  for (int fr = 0; fr < t; ++fr)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        raw.push_back(
            SineTransform(Fractal(c, r, fr, p), p.phi_sine));
  const double lo = *std::min_element(raw.begin(), raw.end());
  const double hi = *std::max_element(raw.begin(), raw.end());
  for (size_t i = 0; i < raw.size(); ++i) {
    ASSERT_NEAR(f.data()[i], (raw[i] - lo) / (hi - lo), 1e-12);
  }
}

TEST(GenerateFieldTest, DeterministicPerSeed) {
  PerlinParams p;
  p.seed = 9;
  const NoiseField a = GenerateField(4, 16, 16, p);
  const NoiseField b = GenerateField(4, 16, 16, p);
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  p.seed = 10;
  const NoiseField c = GenerateField(4, 16, 16, p);
  EXPECT_FALSE(std::equal(a.data().begin(), a.data().end(), c.data().begin()));
}

TEST(GenerateFieldTest, TemporallyCoherent) {
  // Adjacent frames are far closer than frames of an unrelated seed.
  PerlinParams p;
  p.seed = 12;
  const NoiseField f = GenerateField(8, 32, 32, p);
  p.seed = 13;
  const NoiseField g = GenerateField(8, 32, 32, p);
  double adjacent = 0, unrelated = 0;
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) {
      adjacent += std::abs(f.at(3, r, c) - f.at(4, r, c));
      unrelated += std::abs(f.at(3, r, c) - g.at(3, r, c));
    }
  EXPECT_LT(adjacent, 0.5 * unrelated);
}

TEST(GenerateFieldTest, ConstantFieldBecomesHalf) {
  // A single voxel at the origin is a lattice point: the field is constant.
  const NoiseField f = GenerateField(1, 1, 1, PerlinParams{});
  EXPECT_EQ(f.at(0, 0, 0), 0.5);
}

TEST(GenerateFieldTest, RejectsBadArguments) {
  EXPECT_THROW(GenerateField(0, 2, 2, PerlinParams{}), ShapeError);
  PerlinParams p;
  p.omega = 0;
  EXPECT_THROW(GenerateField(1, 2, 2, p), DomainError);
}

}  // namespace
}  // namespace vidaudit
