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

// Slow, independent reference implementations used as test oracles. They
// are written from the defining formulas and share no code with the
// library beyond the data types.

#ifndef VIDAUDIT_TESTS_ORACLES_H_
#define VIDAUDIT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vidaudit/perlin.h"
#include "vidaudit/video.h"

namespace vidaudit::testing {

// Rank of values[i] among |values|: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> NaiveAverageRanks(const std::vector<double>& mags) {
  std::vector<double> ranks(mags.size());
  for (size_t i = 0; i < mags.size(); ++i) {
    int less = 0, equal = 0;
    for (size_t j = 0; j < mags.size(); ++j) {
      if (mags[j] < mags[i]) ++less;
      if (mags[j] == mags[i]) ++equal;
    }
    ranks[i] = 1.0 + less + (equal - 1) / 2.0;
  }
  return ranks;
}

struct BruteWilcoxon {
  double w = 0;
  int n = 0;
  double p = 1;
};

// Drops |d| < 1e-12, ranks |d|, W = sum of ranks of negative d, and
// p = P(W' >= W) by visiting all 2^n sign assignments.
inline BruteWilcoxon BruteForceWilcoxon(const std::vector<double>& values,
                                        double h) {
  std::vector<double> d;
  for (double v : values) {
    if (std::abs(v - h) >= 1e-12) d.push_back(v - h);
  }
  BruteWilcoxon out;
  out.n = int(d.size());
  if (d.empty()) return out;
  std::vector<double> mags;
  for (double x : d) mags.push_back(std::abs(x));
  const std::vector<double> ranks = NaiveAverageRanks(mags);
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) out.w += ranks[i];
  }
  const uint64_t patterns = uint64_t(1) << d.size();
  uint64_t hits = 0;
  for (uint64_t mask = 0; mask < patterns; ++mask) {
    double w = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      if (mask >> i & 1) w += ranks[i];
    }
    if (w >= out.w - 1e-9) ++hits;
  }
  out.p = double(hits) / double(patterns);
  return out;
}

// Mean and variance of W over all 2^n patterns with ranks 1..n.
inline std::pair<double, double> BruteForceMoments(int n) {
  const uint64_t patterns = uint64_t(1) << n;
  double sum = 0, sum_sq = 0;
  for (uint64_t mask = 0; mask < patterns; ++mask) {
    double w = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) w += i + 1;
    }
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / double(patterns);
  return {mean, sum_sq / double(patterns) - mean * mean};
}

// Fade written in monomial form.
inline double NaiveFade(double s) {
  return 6 * std::pow(s, 5) - 15 * std::pow(s, 4) + 10 * std::pow(s, 3);
}

// Perlin value as an explicit weighted sum over the 8 corners, each weight
// the product of fade(1 - |offset|) along the three axes.
template <typename GradientFn>
double NaivePerlin(double x, double y, double t, GradientFn&& grad) {
  const double x0 = std::floor(x), y0 = std::floor(y), t0 = std::floor(t);
  double sum = 0;
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int dk = 0; dk < 2; ++dk) {
        const double ox = x - (x0 + di), oy = y - (y0 + dj),
                     ot = t - (t0 + dk);
        const Vec3 g = grad(int64_t(x0) + di, int64_t(y0) + dj,
                            int64_t(t0) + dk);
        const double weight = NaiveFade(1 - std::abs(ox)) *
                              NaiveFade(1 - std::abs(oy)) *
                              NaiveFade(1 - std::abs(ot));
        sum += weight * (g[0] * ox + g[1] * oy + g[2] * ot);
      }
    }
  }
  return sum;
}

// SSIM with a direct 2D 11x11 window per pixel (truncated at the borders
// and renormalized), averaged over frames and channels.
inline double NaiveSsim(const VideoTensor& a, const VideoTensor& b) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double total = 0;
  int maps = 0;
  for (int f = 0; f < a.t(); ++f) {
    for (int ch = 0; ch < a.c(); ++ch) {
      double frame_sum = 0;
      for (int r = 0; r < a.h(); ++r) {
        for (int c = 0; c < a.w(); ++c) {
          double wsum = 0, ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
          for (int dr = -5; dr <= 5; ++dr) {
            for (int dc = -5; dc <= 5; ++dc) {
              const int rr = r + dr, cc = c + dc;
              if (rr < 0 || rr >= a.h() || cc < 0 || cc >= a.w()) continue;
              const double wgt = std::exp(-(dr * dr + dc * dc) / (2 * 1.5 * 1.5));
              const double va = a.at(f, rr, cc, ch), vb = b.at(f, rr, cc, ch);
              wsum += wgt;
              ma += wgt * va;
              mb += wgt * vb;
              saa += wgt * va * va;
              sbb += wgt * vb * vb;
              sab += wgt * va * vb;
            }
          }
          ma /= wsum;
          mb /= wsum;
          const double va = saa / wsum - ma * ma, vb = sbb / wsum - mb * mb,
                       cov = sab / wsum - ma * mb;
          frame_sum += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
      }
      total += frame_sum / (a.h() * a.w());
      ++maps;
    }
  }
  return total / maps;
}

}  // namespace vidaudit::testing

#endif  // VIDAUDIT_TESTS_ORACLES_H_
