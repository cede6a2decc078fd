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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

// Acklam's rational approximation, relative error about 1.15e-9.
double AcklamQuantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - kLow) {
    const double q = std::sqrt(-2 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double Exponential(int64_t n_r, double width, double c_h) {
  return 2.0 * std::exp(-double(n_r) * width * width / (2.0 * c_h * c_h));
}

// DeltaWMax on a real-valued K, used when K comes from fractional bounds.
double DeltaWMaxReal(double k, double n_m) {
  return k * (2.0 * n_m - k + 1.0) / 2.0;
}

}  // namespace

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double NormalQuantile(double p) {
  if (!(p > 0 && p < 1)) throw DomainError("quantile level must be in (0, 1)");
  double x = AcklamQuantile(p);
  // Halley step on e = Phi(x) - p. Above 1/2 it is written through the
  // upper tail, (1 - p) - Q(x), to avoid cancellation.
  const double e = p > 0.5 ? (1 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2)
                           : NormalCdf(x) - p;
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  x -= u / (1 + x * u / 2);
  return x;
}

void ThresholdModel::Validate() const {
  if (!(mu0 < mu1)) throw DomainError("mu0 must be below mu1");
  if (!(sigma0 > 0 && sigma1 > 0)) throw DomainError("sigmas must be > 0");
  if (!(a > 0 && a < 1 && b > 0 && b < 1)) {
    throw DomainError("a and b must be in (0, 1)");
  }
  if (n < 1) throw DomainError("n must be >= 1");
}

nlohmann::json ThresholdRange::ToJson() const {
  return {{"tau_min", tau_min},
          {"tau_max", tau_max},
          {"midpoint", midpoint},
          {"feasible", feasible}};
}

ThresholdRange ComputeThresholdRange(const ThresholdModel& m) {
  m.Validate();
  const double root_n = std::sqrt(double(m.n));
  ThresholdRange r;
  r.tau_min = m.mu0 + NormalQuantile(1 - m.b) * m.sigma0 / root_n;
  r.tau_max = m.mu1 + NormalQuantile(m.a) * m.sigma1 / root_n;
  r.midpoint = 0.5 * (r.tau_min + r.tau_max);
  r.feasible = r.tau_min <= r.tau_max;
  return r;
}

WilcoxonMoments WilcoxonMomentsOf(int64_t n_m) {
  if (n_m < 1) throw DomainError("n_M must be >= 1");
  const double n = double(n_m);
  return {n * (n + 1) / 4.0, n * (n + 1) * (2 * n + 1) / 24.0};
}

double DeltaWMax(int64_t k, int64_t n_m) {
  if (k < 0 || k > n_m) throw DomainError("K must be in [0, n_M]");
  return DeltaWMaxReal(double(k), double(n_m));
}

double AffectedSamples(int64_t n_m, double f_max, double width) {
  if (f_max < 0) throw DomainError("f_max must be >= 0");
  return double(n_m) * std::min(1.0, 2.0 * f_max * std::max(width, 0.0));
}

void FprBoundInputs::Validate() const {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must be in (0, 1)");
  if (n_m < 1 || n_r < 1) throw DomainError("n_M and n_R must be >= 1");
  if (!(c_h > 0)) throw DomainError("c_h must be > 0");
  if (delta_h < 0 || clip_bound < 0 || f_max < 0) {
    throw DomainError("delta_h, H and f_max must be >= 0");
  }
  if (k_pp < 0 || k_pp > double(n_m)) {
    throw DomainError("k_pp must be in [0, n_M]");
  }
}

nlohmann::json FprBoundTerms::ToJson() const {
  return {{"k", k},
          {"k_clip", k_clip},
          {"k_total", k_total},
          {"k_effective", k_effective},
          {"delta_w_max", delta_w_max},
          {"sigma_w", sigma_w},
          {"alpha", alpha},
          {"rank_term", rank_term},
          {"threshold_term", threshold_term},
          {"clip_term", clip_term},
          {"total", total},
          {"total_capped", total_capped}};
}

FprBoundTerms FprBound(const FprBoundInputs& in) {
  in.Validate();
  FprBoundTerms t;
  t.alpha = in.alpha;
  const double clip_width = in.clip_bound - std::abs(in.mu);
  t.k = AffectedSamples(in.n_m, in.f_max, in.delta_h);
  t.k_clip = AffectedSamples(in.n_m, in.f_max, clip_width);
  t.k_total = t.k + in.k_pp + t.k_clip;
  t.k_effective = std::min(t.k_total, double(in.n_m));
  t.delta_w_max = DeltaWMaxReal(t.k_effective, double(in.n_m));
  t.sigma_w = std::sqrt(WilcoxonMomentsOf(in.n_m).sigma_w_sq);
  t.rank_term =
      t.delta_w_max / (t.sigma_w * std::sqrt(2 * std::numbers::pi));
  t.threshold_term = Exponential(in.n_r, in.delta_h, in.c_h);
  t.clip_term = clip_width > 0 ? Exponential(in.n_r, clip_width, in.c_h) : 2.0;
  t.total = t.alpha + t.rank_term + t.threshold_term + t.clip_term;
  t.total_capped = std::min(1.0, t.total);
  return t;
}

double EstimateCh(std::span<const double> reference_diffs) {
  const size_t n = reference_diffs.size();
  if (n < 2) throw DomainError("need at least two reference differences");
  const double mean =
      std::accumulate(reference_diffs.begin(), reference_diffs.end(), 0.0) /
      double(n);
  double ss = 0;
  for (double v : reference_diffs) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(n - 1)) / std::sqrt(double(n));
}

nlohmann::json DeltaHSweep::ToJson() const {
  return {{"delta_h", delta_h},
          {"total", total},
          {"best_delta_h", best_delta_h},
          {"best_total", best_total}};
}

DeltaHSweep SweepDeltaH(FprBoundInputs in, double lo, double hi, int steps) {
  if (steps < 1 || !(lo >= 0) || !(hi >= lo)) {
    throw DomainError("sweep needs steps >= 1 and 0 <= lo <= hi");
  }
  DeltaHSweep s;
  for (int i = 0; i < steps; ++i) {
    in.delta_h = steps == 1 ? lo : lo + (hi - lo) * double(i) / (steps - 1);
    const double total = FprBound(in).total;
    s.delta_h.push_back(in.delta_h);
    s.total.push_back(total);
    if (i == 0 || total < s.best_total) {
      s.best_total = total;
      s.best_delta_h = in.delta_h;
    }
  }
  return s;
}

}  // namespace vidaudit
