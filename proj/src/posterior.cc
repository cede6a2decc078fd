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

#include "vidaudit/posterior.h"

#include <cmath>
#include <string>

#include "vidaudit/errors.h"

namespace vidaudit {

void PosteriorVector::Validate() const {
  if (probs.size() < 2) {
    throw DomainError("posterior needs at least 2 classes, got " +
                      std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw DomainError("posterior entries must be finite and non-negative");
    }
    sum += p;
  }
  if (!quantized && std::fabs(sum - 1.0) > 1e-6) {
    throw DomainError("posterior sums to " + std::to_string(sum) +
                      ", expected 1");
  }
}

PosteriorVector QuantizePosterior(const PosteriorVector& p, int decimals) {
  if (decimals < 0) throw DomainError("decimals must be >= 0");
  const double scale = std::pow(10.0, decimals);
  PosteriorVector out;
  out.quantized = true;
  out.probs.reserve(p.probs.size());
  for (double v : p.probs) {
    // Beyond ~15 significant digits the scaled value is already integral.
    const double scaled = v * scale;
    if (!std::isfinite(scaled) || std::fabs(scaled) >= 0x1.0p52) {
      out.probs.push_back(v);
      continue;
    }
    out.probs.push_back(std::nearbyint(scaled) / scale);
  }
  return out;
}

}  // namespace vidaudit
