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

#ifndef VIDAUDIT_POSTERIOR_H_
#define VIDAUDIT_POSTERIOR_H_

#include <vector>

namespace vidaudit {

// Class-probability vector returned by a prediction oracle. Entry i always
// refers to class id i.
struct PosteriorVector {
  std::vector<double> probs;
  // Quantized vectors no longer need to sum to one.
  bool quantized = false;

  int num_classes() const { return static_cast<int>(probs.size()); }

  // Throws DomainError unless there are at least two classes, every entry is
  // a finite non-negative number, and (when not quantized) the entries sum to
  // one within 1e-6.
  void Validate() const;
};

// Rounds every probability to `decimals` places, ties to even (the rounding
// used by the common tensor libraries, so 0.25 -> 0.2 at one place). The
// result is flagged quantized. Idempotent for a fixed `decimals`.
PosteriorVector QuantizePosterior(const PosteriorVector& p, int decimals);

}  // namespace vidaudit

#endif  // VIDAUDIT_POSTERIOR_H_
