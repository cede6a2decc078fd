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


#include "vidaudit/theory.h"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <numbers>

#include "oracles.h"
#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

ThresholdModel Reference() {
  return {.mu0 = 0.02, .sigma0 = 0.01, .mu1 = 0.08, .sigma1 = 0.02,
          .n = 100, .a = 0.05, .b = 0.05};
}

FprBoundInputs ExampleInputs() {
  return {.alpha = 0.01, .n_m = 100, .n_r = 100, .delta_h = 0.01,
          .c_h = 0.01, .clip_bound = 0.05, .mu = 0.02, .f_max = 5,
          .k_pp = 1};
}

TEST(NormalQuantileTest, MatchesBoost) {
  const boost::math::normal_distribution<double> n01;
  for (double p : {1e-300, 1e-100, 1e-12, 1e-6, 0.001, 0.01, 0.025, 0.05,
                   0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.975, 0.99, 0.999,
                   1 - 1e-9, 1 - 1e-15}) {
    const double want = boost::math::quantile(n01, p);
    EXPECT_NEAR(NormalQuantile(p), want, 1e-12 * std::max(1.0, std::abs(want)))
        << p;
  }
  EXPECT_THROW(NormalQuantile(0.0), DomainError);
  EXPECT_THROW(NormalQuantile(1.0), DomainError);
}

TEST(NormalCdfTest, MatchesBoost) {
  const boost::math::normal_distribution<double> n01;
  for (double x = -8; x <= 8; x += 0.25) {
    EXPECT_NEAR(NormalCdf(x), boost::math::cdf(n01, x), 1e-15) << x;
  }
}

TEST(ThresholdRangeTest, ReferenceInputs) {
  const auto start = std::chrono::steady_clock::now();
  const ThresholdRange r = ComputeThresholdRange(Reference());
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  EXPECT_NEAR(r.tau_min, 0.022, 5e-4);
  EXPECT_NEAR(r.tau_max, 0.077, 5e-4);
  EXPECT_NEAR(r.midpoint, 0.05, 5e-3);
  EXPECT_TRUE(r.feasible);
  EXPECT_LT(elapsed, 1e-3);
  // Independent recomputation with boost quantiles.
  const boost::math::normal_distribution<double> n01;
  EXPECT_NEAR(r.tau_min, 0.02 + boost::math::quantile(n01, 0.95) * 0.01 / 10,
              1e-14);
  EXPECT_NEAR(r.tau_max, 0.08 + boost::math::quantile(n01, 0.05) * 0.02 / 10,
              1e-14);
}

TEST(ThresholdRangeTest, MedianQuantileAndLargeN) {
  ThresholdModel m = Reference();
  m.a = m.b = 0.5;
  ThresholdRange r = ComputeThresholdRange(m);
  EXPECT_NEAR(r.tau_min, m.mu0, 1e-15);
  EXPECT_NEAR(r.tau_max, m.mu1, 1e-15);
  // The residual is z sigma / sqrt(n): 1.04e-6 for sigma1 = 0.02 at n = 1e9,
  // so the 1e-6 check uses sigma = 0.01 on both sides.
  m = Reference();
  m.sigma1 = 0.01;
  m.n = 1000000000;
  r = ComputeThresholdRange(m);
  EXPECT_NEAR(r.tau_min, m.mu0, 1e-6);
  EXPECT_NEAR(r.tau_max, m.mu1, 1e-6);
  EXPECT_NEAR(m.mu1 - r.tau_max, 1.6448536269514722 * 0.01 / std::sqrt(1e9),
              1e-15);
}

TEST(ThresholdRangeTest, InfeasibleAndInvalid) {
  ThresholdModel m = Reference();
  m.n = 1;
  m.sigma0 = m.sigma1 = 0.1;
  EXPECT_FALSE(ComputeThresholdRange(m).feasible);
  m = Reference();
  m.mu1 = m.mu0;
  EXPECT_THROW(ComputeThresholdRange(m), DomainError);
  m = Reference();
  m.a = 0;
  EXPECT_THROW(ComputeThresholdRange(m), DomainError);
  m = Reference();
  m.sigma0 = 0;
  EXPECT_THROW(ComputeThresholdRange(m), DomainError);
}

TEST(WilcoxonMomentsTest, ClosedForm) {
  WilcoxonMoments w = WilcoxonMomentsOf(10);
  EXPECT_EQ(w.mu_w, 27.5);
  EXPECT_EQ(w.sigma_w_sq, 96.25);
  w = WilcoxonMomentsOf(1);
  EXPECT_EQ(w.mu_w, 0.5);
  EXPECT_EQ(w.sigma_w_sq, 0.25);
}

TEST(WilcoxonMomentsTest, MatchEnumeration) {
  for (int n = 1; n <= 12; ++n) {
    const auto [mean, var] = testing::BruteForceMoments(n);
    const WilcoxonMoments w = WilcoxonMomentsOf(n);
    EXPECT_NEAR(w.mu_w, mean, 1e-9) << n;
    EXPECT_NEAR(w.sigma_w_sq, var, 1e-9) << n;
  }
}

TEST(DeltaWMaxTest, Values) {
  EXPECT_EQ(DeltaWMax(0, 10), 0);
  EXPECT_EQ(DeltaWMax(10, 10), 55);
  EXPECT_EQ(DeltaWMax(2, 10), 19);
  double prev = -1;
  for (int k = 0; k <= 50; ++k) {
    EXPECT_GT(DeltaWMax(k, 50), prev);
    prev = DeltaWMax(k, 50);
  }
  // Flipping the K largest ranks is the worst case: brute-force the sum.
  for (int k = 0; k <= 10; ++k) {
    double top = 0;
    for (int r = 10; r > 10 - k; --r) top += r;
    EXPECT_EQ(DeltaWMax(k, 10), top);
  }
  EXPECT_THROW(DeltaWMax(11, 10), DomainError);
  EXPECT_THROW(DeltaWMax(-1, 10), DomainError);
}

TEST(AffectedSamplesTest, Values) {
  EXPECT_EQ(AffectedSamples(100, 2, 0), 0);
  EXPECT_EQ(AffectedSamples(100, 1e9, 0.1), 100);
  EXPECT_DOUBLE_EQ(AffectedSamples(100, 2, 0.05), 20);
  EXPECT_EQ(AffectedSamples(100, 2, -0.05), 0);
}

TEST(FprBoundTest, TermsMatchIndependentRecomputation) {
  const FprBoundInputs in = ExampleInputs();
  const FprBoundTerms t = FprBound(in);
  const double k = 100 * std::min(1.0, 2 * 5 * 0.01);
  const double k_clip = 100 * std::min(1.0, 2 * 5 * (0.05 - 0.02));
  const double big_k = k + 1 + k_clip;
  const double dw = big_k * (2 * 100 - big_k + 1) / 2;
  const double sigma = std::sqrt(100.0 * 101 * 201 / 24);
  const double rank = dw / (sigma * std::sqrt(2 * std::numbers::pi));
  const double thr = 2 * std::exp(-100 * 0.01 * 0.01 / (2 * 0.01 * 0.01));
  const double clip = 2 * std::exp(-100 * 0.03 * 0.03 / (2 * 0.01 * 0.01));
  EXPECT_NEAR(t.k, 10, 1e-9);
  EXPECT_NEAR(t.k_clip, 30, 1e-9);
  EXPECT_NEAR(t.k_total, 41, 1e-9);
  EXPECT_NEAR(t.delta_w_max, 3280, 1e-9);
  EXPECT_NEAR(t.sigma_w, sigma, 1e-9);
  EXPECT_NEAR(t.rank_term, rank, 1e-9);
  EXPECT_NEAR(t.threshold_term, thr, 1e-9);
  EXPECT_NEAR(t.clip_term, clip, 1e-9);
  EXPECT_NEAR(t.total, 0.01 + rank + thr + clip, 1e-9);
  EXPECT_NEAR(t.total, 4.50915, 1e-5);
  EXPECT_EQ(t.total_capped, 1.0);
  EXPECT_NEAR(t.alpha + t.rank_term + t.threshold_term + t.clip_term, t.total,
              1e-12);
}

TEST(FprBoundTest, VacuousClipTerm) {
  FprBoundInputs in = ExampleInputs();
  in.mu = 0.07;
  const FprBoundTerms t = FprBound(in);
  EXPECT_EQ(t.clip_term, 2.0);
  EXPECT_EQ(t.k_clip, 0.0);
}

TEST(FprBoundTest, ConvergesToAlpha) {
  FprBoundInputs in = ExampleInputs();
  in.n_r = 1000000000;
  in.f_max = 0;
  in.k_pp = 0;
  const FprBoundTerms t = FprBound(in);
  EXPECT_EQ(t.k_total, 0);
  EXPECT_LT(t.total - in.alpha, 1e-6);
  EXPECT_GE(t.total, in.alpha);
}

TEST(FprBoundTest, MonotoneOverGrid) {
  for (double f_max : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    for (double delta_h : {0.0, 0.005, 0.01, 0.02, 0.05}) {
      FprBoundInputs in = ExampleInputs();
      in.f_max = f_max;
      in.delta_h = delta_h;
      double prev = -1;
      for (double k_pp = 0; k_pp <= 20; k_pp += 1) {
        in.k_pp = k_pp;
        const double total = FprBound(in).total;
        ASSERT_GE(total, prev);
        ASSERT_GE(total, in.alpha);
        prev = total;
      }
      in.k_pp = 1;
      prev = 1e300;
      for (int64_t n_r : {1, 10, 100, 1000, 100000}) {
        in.n_r = n_r;
        const double total = FprBound(in).total;
        ASSERT_LE(total, prev);
        prev = total;
      }
    }
  }
}

TEST(FprBoundTest, ValidateRejectsBadInputs) {
  auto bad = [](auto mutate) {
    FprBoundInputs in = ExampleInputs();
    mutate(in);
    EXPECT_THROW(FprBound(in), DomainError);
  };
  bad([](FprBoundInputs& in) { in.n_m = 0; });
  bad([](FprBoundInputs& in) { in.n_r = 0; });
  bad([](FprBoundInputs& in) { in.c_h = 0; });
  bad([](FprBoundInputs& in) { in.alpha = 1; });
  bad([](FprBoundInputs& in) { in.k_pp = 101; });
  bad([](FprBoundInputs& in) { in.f_max = -1; });
  bad([](FprBoundInputs& in) { in.delta_h = -1; });
}

TEST(EstimateChTest, StandardError) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_NEAR(EstimateCh(v), std::sqrt(5.0 / 3) / 2, 1e-15);
  EXPECT_THROW(EstimateCh(std::vector<double>{1}), DomainError);
}

TEST(SweepDeltaHTest, FindsMinimum) {
  FprBoundInputs in = ExampleInputs();
  in.f_max = 1;
  const DeltaHSweep s = SweepDeltaH(in, 0, 0.1, 101);
  ASSERT_EQ(s.delta_h.size(), 101u);
  double best = 1e300;
  for (double v : s.total) best = std::min(best, v);
  EXPECT_EQ(s.best_total, best);
  in.delta_h = s.best_delta_h;
  EXPECT_DOUBLE_EQ(FprBound(in).total, s.best_total);
  EXPECT_THROW(SweepDeltaH(in, 0.1, 0, 5), DomainError);
}

}  // namespace
}  // namespace vidaudit
