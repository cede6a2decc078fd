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

#include "vidaudit/sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "vidaudit/errors.h"
#include "vidaudit/hash.h"
#include "vidaudit/parallel.h"
#include "vidaudit/video_io.h"

namespace vidaudit {
namespace {

using nlohmann::json;

// Hash streams, so that independent draws never share a key.
enum Stream : uint64_t {
  kVariantNoise = 1,
  kSampleLevel = 2,
  kDistractorOrder = 3,
  kPixels = 4,
  kLabels = 5,
  kDatasetSeed = 6,
  kSelectionSeed = 7,
  kNoiseSeed = 8,
  kOracleSeed = 9,
};

uint64_t ContentKey(const VideoTensor& video) {
  const std::vector<uint8_t> bytes = EncodeVtr1(video);
  return HashBytes(bytes);
}

std::string NumberedId(const char* prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, i);
  return buf;
}

}  // namespace

std::string_view BehaviorName(Behavior b) {
  switch (b) {
    case Behavior::kMember:
      return "member";
    case Behavior::kNonMember:
      return "non_member";
    case Behavior::kWeak:
      return "weak";
  }
  return "member";
}

Behavior ParseBehavior(std::string_view name) {
  if (name == "member") return Behavior::kMember;
  if (name == "non_member") return Behavior::kNonMember;
  if (name == "weak") return Behavior::kWeak;
  throw ConfigError("unknown behavior '" + std::string(name) +
                    "' (expected member, non_member or weak)");
}

double SyntheticOracleSpec::ResolvedLevel() const {
  if (level) return *level;
  return behavior == Behavior::kWeak ? 0.6 / num_classes
                                     : 1.0 / std::sqrt(double(num_classes));
}

double SyntheticOracleSpec::ResolvedNaturalGap() const {
  if (natural_gap) return *natural_gap;
  return behavior == Behavior::kWeak ? 0.1 / num_classes : 0.08;
}

double SyntheticOracleSpec::ResolvedNoiseSigma() const {
  if (noise_sigma) return *noise_sigma;
  return behavior == Behavior::kWeak ? 0.05 / num_classes : 0.02;
}

void SyntheticOracleSpec::Validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (num_classes < 2) fail("n_c must be >= 2");
  if (!(base_true_prob >= 0 && base_true_prob <= 1)) {
    fail("base_true_prob must be in [0, 1]");
  }
  if (!(gap >= 0) || base_true_prob - gap < 0) {
    fail("gap must be in [0, base_true_prob]");
  }
  if (const double sigma = ResolvedNoiseSigma();
      !(sigma >= 0) || !std::isfinite(sigma)) {
    fail("noise_sigma must be >= 0");
  }
  if (quantize_decimals && *quantize_decimals < 0) {
    fail("quantize_decimals must be >= 0");
  }
  if (query_limit && *query_limit < 0) fail("query_limit must be >= 0");
  if (top_k < 1 || top_k > num_classes) fail("top_k must be in [1, n_c]");
  const double lv = ResolvedLevel();
  if (!(lv >= 0 && lv <= 1)) fail("level must be in [0, 1]");
  if (!std::isfinite(ResolvedNaturalGap())) fail("natural_gap must be finite");
  if (reference_gap && !std::isfinite(*reference_gap)) {
    fail("reference_gap must be finite");
  }
}

json SyntheticOracleSpec::ToJson() const {
  json j = {{"behavior", std::string(BehaviorName(behavior))},
            {"n_c", num_classes},
            {"base_true_prob", base_true_prob},
            {"gap", gap},
            {"noise_sigma", ResolvedNoiseSigma()},
            {"mode", std::string(ResponseModeName(mode))},
            {"top_k", top_k},
            {"level", ResolvedLevel()},
            {"natural_gap", ResolvedNaturalGap()}};
  j["reference_gap"] = reference_gap ? json(*reference_gap) : json(nullptr);
  j["quantize_decimals"] =
      quantize_decimals ? json(*quantize_decimals) : json(nullptr);
  j["query_limit"] = query_limit ? json(*query_limit) : json(nullptr);
  return j;
}

double HashNormal(uint64_t key) {
  const double u1 = ToUnitOpen(HashCombine(key, 0));
  const double u2 = ToUnitOpen(HashCombine(key, 1));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

SimulatedSuspect::SimulatedSuspect(SyntheticOracleSpec spec,
                                   const DatasetManifest& manifest,
                                   const DatasetPair& pair)
    : spec_(std::move(spec)) {
  spec_.Validate();
  for (const PairEntry& e : pair.entries) {
    if (manifest.Find(e.id) == nullptr) {
      throw IntegrityError("pair sample '" + e.id + "' not in manifest");
    }
  }
  // Published variants win when two variants share bytes: a model that
  // trained on D has seen exactly those bytes.
  for (const PairEntry& e : pair.entries) {
    by_content_.insert_or_assign(
        ContentKey(e.published),
        Known{HashString(e.id), e.label, e.assignment, e.published_variant,
              true});
  }
  for (const PairEntry& e : pair.entries) {
    const Variant v = e.published_variant == Variant::kOriginal
                          ? Variant::kModified
                          : Variant::kOriginal;
    by_content_.emplace(ContentKey(e.unpublished),
                        Known{HashString(e.id), e.label, e.assignment, v,
                              false});
  }
}

double SimulatedSuspect::TrueScore(const Known& k) const {
  const double sigma = spec_.ResolvedNoiseSigma();
  const double e =
      sigma / std::numbers::sqrt2 *
      HashNormal(HashWords(spec_.seed, k.sample_key, kVariantNoise,
                           uint64_t(k.variant)));
  if (spec_.behavior == Behavior::kMember) {
    const double p =
        (k.published ? spec_.base_true_prob
                     : spec_.base_true_prob - spec_.gap) + e;
    return std::clamp(p, 0.0, 1.0);
  }
  const double level =
      spec_.ResolvedLevel() +
      sigma * HashNormal(HashWords(spec_.seed, k.sample_key, kSampleLevel));
  const double g = k.assignment == Assignment::kReference && spec_.reference_gap
                       ? *spec_.reference_gap
                       : spec_.ResolvedNaturalGap();
  const double p = (k.variant == Variant::kOriginal ? level : level - g) + e;
  const double hi = spec_.behavior == Behavior::kWeak
                        ? 0.99 / spec_.num_classes
                        : 1.0;
  return std::clamp(p, 0.0, hi);
}

PosteriorVector SimulatedSuspect::Spread(uint64_t sample_key, int label,
                                         double p) const {
  const int n = spec_.num_classes;
  std::vector<std::pair<uint64_t, int>> order;
  order.reserve(size_t(n) - 1);
  for (int c = 0; c < n; ++c) {
    if (c == label) continue;
    order.emplace_back(
        HashWords(spec_.seed, sample_key, kDistractorOrder, uint64_t(c)), c);
  }
  std::sort(order.begin(), order.end());
  const double norm = 2.0 * (1.0 - std::ldexp(1.0, -(n - 1)));
  PosteriorVector out;
  out.probs.assign(size_t(n), 0.0);
  out.probs[size_t(label)] = p;
  for (size_t r = 0; r < order.size(); ++r) {
    out.probs[size_t(order[r].second)] =
        (1.0 - p) * std::ldexp(1.0, -int(r)) / norm;
  }
  return out;
}

PosteriorVector SimulatedSuspect::Posterior(const VideoTensor& video) const {
  const uint64_t key = ContentKey(video);
  const auto it = by_content_.find(key);
  if (it != by_content_.end()) {
    return Spread(it->second.sample_key, it->second.label,
                  TrueScore(it->second));
  }
  // Never seen: a clean-model answer on a pseudo label.
  const Known unknown{key, int(key % uint64_t(spec_.num_classes)),
                      Assignment::kRemaining, Variant::kOriginal, false};
  SyntheticOracleSpec clean = spec_;
  if (clean.behavior == Behavior::kMember) clean.behavior = Behavior::kNonMember;
  const double p = std::clamp(
      clean.ResolvedLevel() +
          clean.ResolvedNoiseSigma() *
              HashNormal(HashWords(spec_.seed, key, kSampleLevel)),
      0.0, 1.0);
  return Spread(unknown.sample_key, unknown.label, p);
}

OracleResponse SimulatedSuspect::Query(const std::string& /*id*/,
                                       const VideoTensor& video) const {
  const int64_t n = count_.fetch_add(1) + 1;
  if (spec_.query_limit && n > *spec_.query_limit) {
    throw BudgetError("simulated suspect query limit of " +
                      std::to_string(*spec_.query_limit) + " exhausted");
  }
  PosteriorVector p = Posterior(video);
  if (spec_.quantize_decimals) p = QuantizePosterior(p, *spec_.quantize_decimals);
  switch (spec_.mode) {
    case ResponseMode::kFull:
      return OracleResponse::Full(std::move(p));
    case ResponseMode::kTopK:
      return ToTopK(p, spec_.top_k);
    case ResponseMode::kLabel:
      return ToLabelOnly(p);
  }
  return OracleResponse::Full(std::move(p));
}

std::unique_ptr<SimulatedSuspect> MakeSuspect(const SyntheticOracleSpec& spec,
                                              const DatasetManifest& manifest,
                                              const DatasetPair& pair) {
  return std::make_unique<SimulatedSuspect>(spec, manifest, pair);
}

Dataset MakeSyntheticDataset(const SyntheticDatasetOptions& options) {
  if (options.num_classes < 2) throw ConfigError("n_c must be >= 2");
  Dataset d;
  d.reserve(options.size);
  for (size_t i = 0; i < options.size; ++i) {
    std::vector<uint8_t> pixels(options.shape.size());
    for (size_t p = 0; p < pixels.size(); ++p) {
      pixels[p] = uint8_t(HashWords(options.seed, kPixels, i, p) & 0xff);
    }
    const int label = int(HashWords(options.seed, kLabels, i) %
                          uint64_t(options.num_classes));
    d.push_back({NumberedId("s", i), label,
                 VideoTensor(options.shape, std::move(pixels))});
  }
  return d;
}

json EvalSummary::ToJson() const {
  json list = json::array();
  for (const EvalRow& r : rows) {
    list.push_back({{"oracle_id", r.oracle_id},
                    {"behavior", std::string(BehaviorName(r.behavior))},
                    {"positive", r.positive},
                    {"pair", r.pair_index},
                    {"decision", std::string(DecisionName(r.decision))},
                    {"p_value", r.p_value},
                    {"h_bar", r.h_bar},
                    {"h", r.h},
                    {"n_effective", r.n_effective},
                    {"postprocessed_count", r.postprocessed_count}});
  }
  return {{"score_model", "synthetic"},
          {"rows", std::move(list)},
          {"summary",
           {{"tp", tp},
            {"fp", fp},
            {"tn", tn},
            {"fn", fn},
            {"tpr", tpr},
            {"fpr", fpr},
            {"f1", f1 ? json(*f1) : json(nullptr)}}}};
}

std::pair<SyntheticOracleSpec, SyntheticOracleSpec> ScenarioSpecs(
    std::string_view scenario, const AuditConfig& cfg) {
  SyntheticOracleSpec pos, neg;
  pos.behavior = Behavior::kMember;
  neg.behavior = Behavior::kNonMember;
  const double b = cfg.low_prob_bound();
  if (scenario == "weak") {
    neg.behavior = Behavior::kWeak;
    neg.reference_gap = 0.5 * b;
    neg.natural_gap = 0.05 * b;
  } else if (scenario == "inflated") {
    neg.level = 0.6;
    neg.reference_gap = 0.3;
    neg.natural_gap = 0.15;
  } else if (scenario != "default") {
    throw ConfigError("unknown scenario '" + std::string(scenario) +
                      "' (expected default, weak or inflated)");
  }
  pos.num_classes = neg.num_classes = cfg.num_classes;
  return {pos, neg};
}

EvalSummary EvaluateAuditor(const EvalOptions& options, const AuditConfig& cfg,
                            const SyntheticOracleSpec& positive,
                            const SyntheticOracleSpec& negative) {
  cfg.Validate();
  positive.Validate();
  negative.Validate();
  if (options.n_pos < 1 || options.n_neg < 1) {
    throw ConfigError("n_pos and n_neg must be >= 1");
  }

  struct Prepared {
    AuditConfig cfg;
    DatasetManifest manifest;
    DatasetPair pair;
  };
  std::vector<Prepared> pairs(size_t(options.n_pos));
  ParallelFor(pairs.size(), options.jobs, [&](size_t j) {
    SyntheticDatasetOptions dopt = options.dataset;
    dopt.num_classes = cfg.num_classes;
    dopt.seed = HashWords(options.seed, kDatasetSeed, j);
    Prepared& p = pairs[j];
    p.cfg = cfg;
    p.cfg.selection_seed = HashWords(options.seed, kSelectionSeed, j);
    p.cfg.noise_seed = HashWords(options.seed, kNoiseSeed, j);
    const Dataset original = MakeSyntheticDataset(dopt);
    const Dataset modified = ModifyDataset(original, p.cfg);
    p.manifest = SelectSets({}, InfoOf(original), p.cfg);
    p.pair = BuildPair(original, modified, p.manifest);
  });

  const size_t total = size_t(options.n_pos) + size_t(options.n_neg);
  std::vector<EvalRow> rows(total);
  ParallelFor(total, options.jobs, [&](size_t i) {
    const bool is_pos = i < size_t(options.n_pos);
    const size_t local = is_pos ? i : i - size_t(options.n_pos);
    const size_t j = local % size_t(options.n_pos);
    SyntheticOracleSpec spec = is_pos ? positive : negative;
    spec.seed = HashWords(options.seed, kOracleSeed, i);
    const Prepared& p = pairs[j];
    const auto suspect = MakeSuspect(spec, p.manifest, p.pair);
    const AuditReport report = Audit(*suspect, p.manifest, p.pair, p.cfg);
    EvalRow& row = rows[i];
    row.oracle_id = NumberedId(is_pos ? "pos-" : "neg-", local);
    row.behavior = spec.behavior;
    row.positive = is_pos;
    row.pair_index = int(j);
    row.decision = report.decision;
    row.p_value = report.test.p_value;
    row.h_bar = report.h_bar;
    row.h = report.h;
    row.n_effective = report.test.n_effective;
    row.postprocessed_count = report.postprocessed_count;
  });

  EvalSummary s;
  s.rows = std::move(rows);
  for (const EvalRow& r : s.rows) {
    const bool flagged = r.decision == Decision::kMisuse;
    if (r.positive) {
      (flagged ? s.tp : s.fn) += 1;
    } else {
      (flagged ? s.fp : s.tn) += 1;
    }
  }
  s.tpr = double(s.tp) / options.n_pos;
  s.fpr = double(s.fp) / options.n_neg;
  const double precision = s.tp + s.fp > 0 ? double(s.tp) / (s.tp + s.fp) : 0;
  if (precision + s.tpr > 0) {
    s.f1 = 2 * precision * s.tpr / (precision + s.tpr);
  }
  return s;
}

}  // namespace vidaudit
