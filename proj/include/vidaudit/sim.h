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

// Synthetic suspect models and an evaluation harness that audits many of
// them. The score models below are constructions of this library, not
// measurements of real networks.
//
// True-label score of sample s given variant v (e ~ N(0, sigma^2 / 2) drawn
// independently per variant, L_s ~ level + N(0, sigma^2) per sample):
//   member:      published base + e, unpublished base - gap + e
//   non_member:  original L_s + e, modified L_s - g_s + e, where g_s is
//                reference_gap on the reference set (when set) and
//                natural_gap elsewhere
//   weak:        as non_member with every score clamped to [0, 0.99 B]
//
// The natural gap stands for the confidence drop the noise causes on any
// model. Candidates are the samples with the largest such drop on the
// evaluation model, so a clean suspect still sees a positive gap on both
// the reference and the modification set.
//
// The remaining mass 1 - p falls on the other classes along a geometric
// profile (ratio 1/2) in a per-sample seeded order shared by both
// variants, so Top-K ranks respond to the true-label score.

#ifndef VIDAUDIT_SIM_H_
#define VIDAUDIT_SIM_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vidaudit/config.h"
#include "vidaudit/oracle.h"
#include "vidaudit/pipeline.h"
#include "vidaudit/verify.h"

namespace vidaudit {

enum class Behavior { kMember, kNonMember, kWeak };

std::string_view BehaviorName(Behavior b);
// Accepts "member", "non_member" and "weak". Throws ConfigError.
Behavior ParseBehavior(std::string_view name);

struct SyntheticOracleSpec {
  Behavior behavior = Behavior::kMember;
  int num_classes = 101;
  double base_true_prob = 0.6;  // member: published-variant score
  double gap = 0.4;             // member: published minus unpublished
  // Unset means 0.02, or 0.05 B for weak.
  std::optional<double> noise_sigma;
  uint64_t seed = 0;
  std::optional<int> quantize_decimals;
  std::optional<int64_t> query_limit;
  ResponseMode mode = ResponseMode::kFull;
  int top_k = 5;
  // Non-member and weak. Unset level means 1/sqrt(n_c) for non_member and
  // 0.6 B for weak; unset natural_gap means 0.08, or 0.1 B for weak.
  std::optional<double> level;
  std::optional<double> natural_gap;
  std::optional<double> reference_gap;

  // Throws ConfigError: n_c < 2, base_true_prob - gap < 0, probabilities or
  // sigma out of range, top_k outside [1, n_c], negative decimals or limit.
  void Validate() const;

  // Resolved per-behavior parameters.
  double ResolvedLevel() const;
  double ResolvedNaturalGap() const;
  double ResolvedNoiseSigma() const;

  nlohmann::json ToJson() const;
};

// Deterministic N(0, 1) draw addressed by a hash key.
double HashNormal(uint64_t key);

// Black-box simulated suspect. Sees only pixels: a query is matched to a
// manifest sample and variant by the hash of its VTR1 bytes, and the query
// id is ignored. Videos it has never seen get a non-member score.
class SimulatedSuspect : public Oracle {
 public:
  SimulatedSuspect(SyntheticOracleSpec spec, const DatasetManifest& manifest,
                   const DatasetPair& pair);

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

  int64_t query_count() const { return count_.load(); }
  const SyntheticOracleSpec& spec() const { return spec_; }

  // Full posterior before quantization and mode restriction.
  PosteriorVector Posterior(const VideoTensor& video) const;

 private:
  struct Known {
    uint64_t sample_key;
    int label;
    Assignment assignment;
    Variant variant;
    bool published;
  };

  double TrueScore(const Known& k) const;
  PosteriorVector Spread(uint64_t sample_key, int label, double p) const;

  SyntheticOracleSpec spec_;
  std::map<uint64_t, Known> by_content_;
  mutable std::atomic<int64_t> count_{0};
};

std::unique_ptr<SimulatedSuspect> MakeSuspect(const SyntheticOracleSpec& spec,
                                              const DatasetManifest& manifest,
                                              const DatasetPair& pair);

struct SyntheticDatasetOptions {
  size_t size = 1000;
  VideoShape shape{4, 8, 8, 1};
  int num_classes = 101;
  uint64_t seed = 0;
};

// Seeded random videos with uniform labels; ids are "s000000", ...
Dataset MakeSyntheticDataset(const SyntheticDatasetOptions& options);

struct EvalOptions {
  int n_pos = 10;
  int n_neg = 100;
  SyntheticDatasetOptions dataset;  // dataset.seed is overridden per pair
  uint64_t seed = 0;                // master seed
  int jobs = 1;
};

struct EvalRow {
  std::string oracle_id;
  Behavior behavior = Behavior::kMember;
  bool positive = false;  // ground truth: trained on the published data
  int pair_index = 0;
  Decision decision = Decision::kNoMisuse;
  double p_value = 1;
  double h_bar = 0;
  double h = 0;
  int n_effective = 0;
  int postprocessed_count = 0;
};

struct EvalSummary {
  std::vector<EvalRow> rows;
  int tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0;
  double fpr = 0;
  std::optional<double> f1;  // absent when precision + recall is zero

  nlohmann::json ToJson() const;
};

// Positive and negative suspect specs of a named evaluation scenario, sized
// for cfg.num_classes:
//   default   member vs non_member
//   weak      member vs weak suspects whose reference pairs drop by 0.5 B
//             and modification pairs by 0.05 B (exercises post-processing)
//   inflated  member vs non_member suspects with reference gap 0.3 and
//             modification gap 0.15, so h_bar is about 0.3 (exercises
//             clipping)
// Throws ConfigError for other names.
std::pair<SyntheticOracleSpec, SyntheticOracleSpec> ScenarioSpecs(
    std::string_view scenario, const AuditConfig& cfg);

// Builds n_pos independent dataset pairs from the master seed. Positive j
// is a `positive` oracle on pair j; negative i is a `negative` oracle on
// pair i mod n_pos. Every oracle gets its own seed; the specs' seeds are
// ignored.
EvalSummary EvaluateAuditor(const EvalOptions& options, const AuditConfig& cfg,
                            const SyntheticOracleSpec& positive,
                            const SyntheticOracleSpec& negative);

}  // namespace vidaudit

#endif  // VIDAUDIT_SIM_H_
