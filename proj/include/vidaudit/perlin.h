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

// Spatio-temporal gradient noise.
//
// A lattice gradient is drawn per integer corner (i, j, k), the eight corner
// contributions dot(g, offset) are blended with the quintic fade curve, and
// octaves are summed with halving amplitude and doubling frequency:
//
//   S(x, y, t) = sum_{n=1..omega} 2^-n P_n(2^(n-1) x / lx, 2^(n-1) y / ly,
//                                         2^(n-1) t / lt)
//   G(x, y, t) = sin(2 pi phi S(x, y, t))
//
// Every octave P_n is an independent field seeded by HashWords(seed, n).
// All randomness comes from integer hashing, so fields are reproducible
// across runs and thread counts.

#ifndef VIDAUDIT_PERLIN_H_
#define VIDAUDIT_PERLIN_H_

#include <array>
#include <cmath>
#include <cstdint>

#include "vidaudit/video.h"

namespace vidaudit {

struct PerlinParams {
  double lambda_x = 32.0;  // pixels
  double lambda_y = 32.0;  // pixels
  double lambda_t = 6.4;   // frames
  double phi_sine = 1.0;
  int omega = 2;  // octave count
  uint64_t seed = 0;

  // Throws DomainError for non-positive wavelengths/frequency or omega < 1.
  void Validate() const;
};

using Vec3 = std::array<double, 3>;

// 6s^5 - 15s^4 + 10s^3. Throws DomainError outside [0, 1].
double Fade(double s);

// Unit-length gradient for lattice corner (i, j, k): a Box-Muller Gaussian
// triple drawn from hashes of (seed, i, j, k, counter), normalized. Draws
// with norm below 1e-12 are repeated with the next counter.
Vec3 GradientAt(int64_t i, int64_t j, int64_t k, uint64_t seed);

namespace internal {

constexpr double FadeUnchecked(double s) {
  return s * s * s * (s * (s * 6.0 - 15.0) + 10.0);
}

inline double Lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace internal

// Perlin value with a caller-supplied gradient lookup
// `grad(int64_t i, int64_t j, int64_t k) -> Vec3`.
template <typename GradientFn>
double PerlinValueWith(double x, double y, double t, GradientFn&& grad) {
  const double fi = std::floor(x), fj = std::floor(y), fk = std::floor(t);
  const int64_t i = int64_t(fi), j = int64_t(fj), k = int64_t(fk);
  const double u = x - fi, v = y - fj, w = t - fk;
  double corner[2][2][2];
  for (int dk = 0; dk < 2; ++dk) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int di = 0; di < 2; ++di) {
        const Vec3 g = grad(i + di, j + dj, k + dk);
        corner[dk][dj][di] =
            g[0] * (u - di) + g[1] * (v - dj) + g[2] * (w - dk);
      }
    }
  }
  const double fu = internal::FadeUnchecked(u);
  const double fv = internal::FadeUnchecked(v);
  const double fw = internal::FadeUnchecked(w);
  double plane[2];
  for (int dk = 0; dk < 2; ++dk) {
    const double lo = internal::Lerp(corner[dk][0][0], corner[dk][0][1], fu);
    const double hi = internal::Lerp(corner[dk][1][0], corner[dk][1][1], fu);
    plane[dk] = internal::Lerp(lo, hi, fv);
  }
  return internal::Lerp(plane[0], plane[1], fw);
}

// Trilinearly fade-interpolated corner dot products. Exactly zero on integer
// lattice points; bounded by sqrt(3) in magnitude.
double PerlinValue(double x, double y, double t, uint64_t seed);

// Seed of octave n (1-based).
uint64_t OctaveSeed(uint64_t seed, int octave);

// Octave sum with a caller-supplied octave evaluator
// `octave(int n, double x, double y, double t) -> double`, where (x, y, t)
// are already scaled by 2^(n-1) / lambda.
template <typename OctaveFn>
double FractalWith(double x, double y, double t, const PerlinParams& p,
                   OctaveFn&& octave) {
  double sum = 0.0;
  for (int n = 1; n <= p.omega; ++n) {
    const double freq = std::ldexp(1.0, n - 1);
    sum += std::ldexp(1.0, -n) * octave(n, freq * x / p.lambda_x,
                                        freq * y / p.lambda_y,
                                        freq * t / p.lambda_t);
  }
  return sum;
}

// Fractal sum over p.omega octaves. |result| <= sqrt(3) (1 - 2^-omega).
double Fractal(double x, double y, double t, const PerlinParams& p);

// sin(2 pi phi s).
double SineTransform(double s, double phi_sine);

// Evaluates the sine-transformed fractal at every voxel, with voxel
// (frame f, row r, col c) mapped to (x, y, t) = (c, r, f), then min-max
// normalizes over the whole field. A constant field (range < 1e-12) becomes
// all 0.5. Throws ShapeError for dims < 1 and DomainError for bad params.
NoiseField GenerateField(int t, int h, int w, const PerlinParams& p);

}  // namespace vidaudit

#endif  // VIDAUDIT_PERLIN_H_
