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

// Closed-form calculators for choosing the threshold and bounding the false
// positive rate of the audit.

#ifndef VIDAUDIT_THEORY_H_
#define VIDAUDIT_THEORY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace vidaudit {

// Standard normal CDF.
double NormalCdf(double x);

// z with NormalCdf(z) = p. Rational approximation refined by one Halley
// step; absolute error well below 1e-12 on (1e-300, 1 - 1e-16). Throws
// DomainError outside (0, 1).
double NormalQuantile(double p);

struct ThresholdModel {
  double mu0 = 0, sigma0 = 0;  // mean/std of h_bar on a clean model
  double mu1 = 0, sigma1 = 0;  // mean/std of h_bar on a misusing model
  int64_t n = 1;
  double a = 0.05;  // tolerated false positive rate
  double b = 0.05;  // tolerated false negative rate

  // Throws DomainError unless mu0 < mu1, sigmas > 0, a and b in (0, 1) and
  // n >= 1.
  void Validate() const;
};

struct ThresholdRange {
  double tau_min = 0;  // mu0 + z_{1-b} sigma0 / sqrt(n)
  double tau_max = 0;  // mu1 + z_a sigma1 / sqrt(n)
  double midpoint = 0;
  bool feasible = false;  // tau_min <= tau_max

  nlohmann::json ToJson() const;
};

ThresholdRange ComputeThresholdRange(const ThresholdModel& m);

struct WilcoxonMoments {
  double mu_w = 0;        // n(n+1)/4
  double sigma_w_sq = 0;  // n(n+1)(2n+1)/24
};

WilcoxonMoments WilcoxonMomentsOf(int64_t n_m);

// Largest change of the signed-rank sum when K of n_M signs flip:
// K(2 n_M - K + 1) / 2. Throws DomainError unless 0 <= K <= n_M.
double DeltaWMax(int64_t k, int64_t n_m);

// n_M min(1, 2 f_max width); a negative width counts as zero.
double AffectedSamples(int64_t n_m, double f_max, double width);

struct FprBoundInputs {
  double alpha = 0.01;
  int64_t n_m = 0;
  int64_t n_r = 0;
  double delta_h = 0;  // tolerated deviation of h_bar from mu
  double c_h = 0;      // sub-Gaussian constant of the reference differences
  double clip_bound = 0.05;  // H
  double mu = 0;             // population mean of reference differences
  double f_max = 0;          // density bound of the differences near h
  double k_pp = 0;           // cap on post-processed pairs

  // Throws DomainError on non-positive n_m, n_r or c_h, negative widths or
  // densities, alpha outside (0, 1), or k_pp outside [0, n_m].
  void Validate() const;
};

struct FprBoundTerms {
  double k = 0;        // affected by threshold estimation error
  double k_clip = 0;   // affected by clipping
  double k_total = 0;  // k + k_pp + k_clip
  // k_total capped at n_M: at most every sign flips.
  double k_effective = 0;
  double delta_w_max = 0;
  double sigma_w = 0;
  double alpha = 0;
  double rank_term = 0;       // delta_w_max / (sigma_w sqrt(2 pi))
  double threshold_term = 0;  // 2 exp(-n_R delta_h^2 / (2 c_h^2))
  double clip_term = 0;       // 2 exp(-n_R (H - |mu|)^2 / (2 c_h^2)), or 2
  double total = 0;           // raw bound, may exceed 1
  double total_capped = 0;    // min(1, total)

  nlohmann::json ToJson() const;
};

FprBoundTerms FprBound(const FprBoundInputs& in);

// c_h estimate s_R / sqrt(n_R) from observed reference differences, with
// s_R the sample standard deviation. Throws DomainError for fewer than two
// values.
double EstimateCh(std::span<const double> reference_diffs);

struct DeltaHSweep {
  std::vector<double> delta_h;
  std::vector<double> total;
  double best_delta_h = 0;
  double best_total = 0;

  nlohmann::json ToJson() const;
};

// Evaluates the bound on `steps` evenly spaced delta_h in [lo, hi] and
// reports the smallest total.
DeltaHSweep SweepDeltaH(FprBoundInputs in, double lo, double hi, int steps);

}  // namespace vidaudit

#endif  // VIDAUDIT_THEORY_H_
