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

// Ownership verification against a suspect model.
//
// Reference set R: published original o, unpublished modified o'.
//   ds_o = P(o) - P(o')   -> h_bar = mean(ds_R), h = clip(h_bar, -H, H)
// Modification set M: unpublished original g, published modified g'.
//   ds_g = P(g) - P(g'), or (1 + beta) h_bar when both scores are below B.
// A model that trained on the published data knows g' better than g, which
// pushes ds_g below h. The one-sided Wilcoxon signed-rank test on
// d_i = ds_g - h decides whether that happened.

#ifndef VIDAUDIT_VERIFY_H_
#define VIDAUDIT_VERIFY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vidaudit/config.h"
#include "vidaudit/errors.h"
#include "vidaudit/oracle.h"
#include "vidaudit/pipeline.h"

namespace vidaudit {

// |d| below this counts as an exact zero and is dropped from the test.
inline constexpr double kZeroTolerance = 1e-12;
// Largest n_effective evaluated with the exact null distribution.
inline constexpr int kExactWilcoxonMaxN = 20;

struct Threshold {
  double h_bar = 0;
  double h = 0;
};

// Mean of the reference differences and its clip to [-H, H]. With
// clip == false, h == h_bar. Throws ConfigError on an empty list.
Threshold ReferenceThreshold(std::span<const double> delta_s_r,
                             double clip_bound, bool clip = true);

// (1 + beta) h_bar when p_mod < B and p_orig < B, else p_orig - p_mod.
double PostprocessDiff(double p_mod, double p_orig, double low_prob_bound,
                       double beta, double h_bar);

// Average ranks (1-based) of |values| in ascending order.
std::vector<double> AverageRanks(std::span<const double> magnitudes);

// P(W' >= w) where W' sums a uniformly random subset of `ranks`. Ranks must
// be multiples of 1/2. Exact; cost O(n * sum(ranks)).
double WilcoxonExactUpperTail(std::span<const double> ranks, double w);

// Normal approximation of the same tail with tie and continuity corrections.
double WilcoxonNormalUpperTail(std::span<const double> ranks, double w);

struct WilcoxonResult {
  double w = 0;         // sum of ranks of negative d_i
  int n_effective = 0;  // d_i with |d_i| >= kZeroTolerance
  double p_value = 1.0;
  bool reject = false;
  bool exact = true;        // exact null distribution was used
  bool degenerate = false;  // n_effective == 0
  // Smallest attainable p, 2^-n_effective, is not below alpha.
  bool underpowered = false;
};

// One-sided signed-rank test of H0: median(delta_s_m - h) >= 0.
WilcoxonResult WilcoxonOneSided(std::span<const double> delta_s_m, double h,
                                double alpha);

enum class Decision { kNoMisuse, kMisuse };

std::string_view DecisionName(Decision d);

// One queried pair. p_original is the true-label score of the original
// variant, p_modified that of the modified variant.
struct PairScore {
  std::string id;
  int label = 0;
  double p_original = 0;
  double p_modified = 0;
  double diff = 0;
  bool postprocessed = false;
};

struct AuditReport {
  std::string config_hash;
  std::vector<PairScore> reference;     // sorted by id
  std::vector<PairScore> modification;  // sorted by id
  double h_bar = 0;
  double h = 0;
  bool clipped = false;  // h != h_bar
  int postprocessed_count = 0;
  WilcoxonResult test;
  double alpha = 0;
  Decision decision = Decision::kNoMisuse;
  int64_t query_count = 0;
  std::vector<std::string> warnings;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // ISO-8601 UTC
  // Set on partial reports carried by AuditAborted.
  bool aborted = false;
  std::string abort_reason;

  std::vector<double> delta_s_r() const;
  std::vector<double> delta_s_m() const;

  // All fields. Timestamps are omitted when include_timestamps is false so
  // two runs can be compared byte for byte.
  nlohmann::json ToJson(bool include_timestamps = true) const;
};

// Thrown when the oracle fails mid-audit. Carries what was collected so
// far; kind() is the kind of the underlying error ("query", "budget", ...).
class AuditAborted : public Error {
 public:
  AuditAborted(const std::string& kind, const std::string& message,
               AuditReport partial)
      : Error(kind, message), partial_(std::move(partial)) {}

  const AuditReport& partial() const { return partial_; }

 private:
  AuditReport partial_;
};

struct AuditOptions {
  int jobs = 1;
  // Total queries allowed. An audit needs 2(|R| + |M|); a smaller limit
  // fails with BudgetError before any query is sent.
  std::optional<int64_t> query_limit;
};

// Runs the verification end to end. Throws IntegrityError when the pair
// lacks a manifest sample, BudgetError when query_limit cannot cover the
// audit, and AuditAborted when the oracle fails.
AuditReport Audit(const Oracle& suspect, const DatasetManifest& manifest,
                  const DatasetPair& pair, const AuditConfig& cfg,
                  const AuditOptions& options = {});

// Statistical half of the audit on already collected scores. `reference` and
// `modification` need not be sorted.
AuditReport Decide(std::vector<PairScore> reference,
                   std::vector<PairScore> modification,
                   const AuditConfig& cfg);

}  // namespace vidaudit

#endif  // VIDAUDIT_VERIFY_H_
