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

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "vidaudit/errors.h"
#include "vidaudit/hash.h"

namespace vidaudit {
namespace {

// Gradients of one octave over the lattice cells a field can touch.
class GradientTable {
 public:
  GradientTable(int64_t ni, int64_t nj, int64_t nk, uint64_t seed)
      : ni_(ni), nj_(nj), grads_(size_t(ni * nj * nk)) {
    for (int64_t k = 0; k < nk; ++k) {
      for (int64_t j = 0; j < nj; ++j) {
        for (int64_t i = 0; i < ni; ++i) {
          grads_[size_t((k * nj_ + j) * ni_ + i)] = GradientAt(i, j, k, seed);
        }
      }
    }
  }

  const Vec3& operator()(int64_t i, int64_t j, int64_t k) const {
    return grads_[size_t((k * nj_ + j) * ni_ + i)];
  }

 private:
  int64_t ni_;
  int64_t nj_;
  std::vector<Vec3> grads_;
};

}  // namespace

void PerlinParams::Validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(lambda_x) || !positive(lambda_y) || !positive(lambda_t)) {
    throw DomainError("Perlin wavelengths must be finite and > 0");
  }
  if (!positive(phi_sine)) throw DomainError("phi_sine must be > 0");
  if (omega < 1) throw DomainError("omega must be >= 1");
}

double Fade(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("fade argument " + std::to_string(s) +
                      " outside [0, 1]");
  }
  return internal::FadeUnchecked(s);
}

Vec3 GradientAt(int64_t i, int64_t j, int64_t k, uint64_t seed) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (uint64_t counter = 0;; ++counter) {
    const uint64_t base = HashWords(seed, i, j, k);
    double u[4];
    for (int m = 0; m < 4; ++m) {
      u[m] = ToUnitOpen(HashCombine(base, counter * 4 + m));
    }
    const double r0 = std::sqrt(-2.0 * std::log(u[0]));
    const double r1 = std::sqrt(-2.0 * std::log(u[2]));
    Vec3 g = {r0 * std::cos(kTwoPi * u[1]), r0 * std::sin(kTwoPi * u[1]),
              r1 * std::cos(kTwoPi * u[3])};
    const double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (norm < 1e-12) continue;
    for (double& c : g) c /= norm;
    return g;
  }
}

double PerlinValue(double x, double y, double t, uint64_t seed) {
  return PerlinValueWith(x, y, t, [seed](int64_t i, int64_t j, int64_t k) {
    return GradientAt(i, j, k, seed);
  });
}

uint64_t OctaveSeed(uint64_t seed, int octave) {
  return HashWords(seed, uint64_t(octave));
}

double Fractal(double x, double y, double t, const PerlinParams& p) {
  return FractalWith(x, y, t, p, [&p](int n, double sx, double sy, double st) {
    return PerlinValue(sx, sy, st, OctaveSeed(p.seed, n));
  });
}

double SineTransform(double s, double phi_sine) {
  return std::sin(2.0 * std::numbers::pi * phi_sine * s);
}

NoiseField GenerateField(int t, int h, int w, const PerlinParams& p) {
  p.Validate();
  NoiseField field(t, h, w);

  // The lattice corners reachable by octave n span [0, floor(max coord) + 1]
  // on each axis; precomputing them makes the per-voxel cost independent of
  // the gradient hash.
  std::vector<GradientTable> tables;
  tables.reserve(size_t(p.omega));
  for (int n = 1; n <= p.omega; ++n) {
    const double freq = std::ldexp(1.0, n - 1);
    const auto extent = [freq](int dim, double lambda) {
      return int64_t(std::floor(freq * double(dim - 1) / lambda)) + 2;
    };
    tables.emplace_back(extent(w, p.lambda_x), extent(h, p.lambda_y),
                        extent(t, p.lambda_t), OctaveSeed(p.seed, n));
  }
  auto octave = [&tables](int n, double sx, double sy, double st) {
    const GradientTable& table = tables[size_t(n - 1)];
    return PerlinValueWith(sx, sy, st, [&table](int64_t i, int64_t j,
                                                int64_t k) {
      return table(i, j, k);
    });
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::span<double> out = field.mutable_data();
  size_t idx = 0;
  for (int f = 0; f < t; ++f) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c, ++idx) {
        const double s = FractalWith(double(c), double(r), double(f), p, octave);
        const double g = SineTransform(s, p.phi_sine);
        out[idx] = g;
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
    }
  }
  const double range = hi - lo;
  for (double& v : out) {
    v = range < 1e-12 ? 0.5 : std::clamp((v - lo) / range, 0.0, 1.0);
  }
  return field;
}

}  // namespace vidaudit
