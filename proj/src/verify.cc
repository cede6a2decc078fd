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

#include "vidaudit/verify.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>
#include <optional>

#include "vidaudit/parallel.h"

namespace vidaudit {
namespace {

using nlohmann::json;

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Smallest n with 2^-n < alpha.
int MinimumRejectableN(double alpha) {
  int n = 0;
  while (std::ldexp(1.0, -n) >= alpha) ++n;
  return n;
}

void SortById(std::vector<PairScore>& scores) {
  std::sort(scores.begin(), scores.end(),
            [](const PairScore& a, const PairScore& b) { return a.id < b.id; });
}

json ScoresToJson(const std::vector<PairScore>& scores, bool with_pp) {
  json list = json::array();
  for (const PairScore& s : scores) {
    json row = {{"id", s.id},
                {"label", s.label},
                {"p_original", s.p_original},
                {"p_modified", s.p_modified},
                {"diff", s.diff}};
    if (with_pp) row["postprocessed"] = s.postprocessed;
    list.push_back(std::move(row));
  }
  return list;
}

}  // namespace

Threshold ReferenceThreshold(std::span<const double> delta_s_r,
                             double clip_bound, bool clip) {
  if (delta_s_r.empty()) {
    throw ConfigError("reference set is empty; no threshold can be estimated");
  }
  Threshold t;
  t.h_bar = std::accumulate(delta_s_r.begin(), delta_s_r.end(), 0.0) /
            double(delta_s_r.size());
  t.h = clip ? std::clamp(t.h_bar, -clip_bound, clip_bound) : t.h_bar;
  return t;
}

double PostprocessDiff(double p_mod, double p_orig, double low_prob_bound,
                       double beta, double h_bar) {
  if (p_mod < low_prob_bound && p_orig < low_prob_bound) {
    return (1.0 + beta) * h_bar;
  }
  return p_orig - p_mod;
}

std::vector<double> AverageRanks(std::span<const double> magnitudes) {
  const size_t n = magnitudes.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return magnitudes[a] < magnitudes[b];
  });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double avg = 0.5 * double(i + j + 2);
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double WilcoxonExactUpperTail(std::span<const double> ranks, double w) {
  // Work with doubled ranks so average ranks become integers.
  std::vector<int64_t> doubled;
  doubled.reserve(ranks.size());
  int64_t total = 0;
  for (double r : ranks) {
    const int64_t d = std::llround(2.0 * r);
    if (r < 0 || std::abs(2.0 * r - double(d)) > 1e-9) {
      throw DomainError("ranks must be non-negative multiples of 1/2");
    }
    doubled.push_back(d);
    total += d;
  }
  std::vector<double> count(size_t(total) + 1, 0.0);
  count[0] = 1.0;
  int64_t reach = 0;
  for (int64_t d : doubled) {
    for (int64_t s = reach; s >= 0; --s) {
      if (count[size_t(s)] != 0) count[size_t(s + d)] += count[size_t(s)];
    }
    reach += d;
  }
  const int64_t target = std::llround(std::ceil(2.0 * w - 1e-9));
  double tail = 0;
  for (int64_t s = std::max<int64_t>(target, 0); s <= total; ++s) {
    tail += count[size_t(s)];
  }
  return std::min(1.0, std::ldexp(tail, -int(ranks.size())));
}

double WilcoxonNormalUpperTail(std::span<const double> ranks, double w) {
  const double n = double(ranks.size());
  if (ranks.empty()) return 1.0;
  const double mu = n * (n + 1) / 4.0;
  double var = n * (n + 1) * (2 * n + 1) / 24.0;
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size();) {
    size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = double(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (var <= 0) return w > mu ? 0.0 : 1.0;
  const double z = (w - mu - 0.5) / std::sqrt(var);
  return std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

WilcoxonResult WilcoxonOneSided(std::span<const double> delta_s_m, double h,
                                double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must be in (0, 1)");
  std::vector<double> d;
  for (double v : delta_s_m) {
    const double di = v - h;
    if (std::abs(di) >= kZeroTolerance) d.push_back(di);
  }
  WilcoxonResult r;
  r.n_effective = int(d.size());
  if (d.empty()) {
    r.degenerate = true;
    r.underpowered = true;
    return r;
  }
  std::vector<double> mags(d.size());
  std::transform(d.begin(), d.end(), mags.begin(),
                 [](double x) { return std::abs(x); });
  const std::vector<double> ranks = AverageRanks(mags);
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) r.w += ranks[i];
  }
  r.exact = r.n_effective <= kExactWilcoxonMaxN;
  r.p_value = r.exact ? WilcoxonExactUpperTail(ranks, r.w)
                      : WilcoxonNormalUpperTail(ranks, r.w);
  r.underpowered = std::ldexp(1.0, -r.n_effective) >= alpha;
  r.reject = r.p_value < alpha;
  return r;
}

std::string_view DecisionName(Decision d) {
  return d == Decision::kMisuse ? "misuse" : "no_misuse";
}

std::vector<double> AuditReport::delta_s_r() const {
  std::vector<double> out;
  for (const PairScore& s : reference) out.push_back(s.diff);
  return out;
}

std::vector<double> AuditReport::delta_s_m() const {
  std::vector<double> out;
  for (const PairScore& s : modification) out.push_back(s.diff);
  return out;
}

json AuditReport::ToJson(bool include_timestamps) const {
  json j = {{"config_hash", config_hash},
            {"reference", ScoresToJson(reference, false)},
            {"modification", ScoresToJson(modification, true)},
            {"delta_s_R", delta_s_r()},
            {"delta_s_M", delta_s_m()},
            {"h_bar", h_bar},
            {"h", h},
            {"clipped", clipped},
            {"postprocessed_count", postprocessed_count},
            {"W", test.w},
            {"n_effective", test.n_effective},
            {"p_value", test.p_value},
            {"exact", test.exact},
            {"degenerate", test.degenerate},
            {"underpowered", test.underpowered},
            {"alpha", alpha},
            {"decision", std::string(DecisionName(decision))},
            {"query_count", query_count},
            {"warnings", warnings},
            {"aborted", aborted}};
  if (aborted) j["abort_reason"] = abort_reason;
  if (include_timestamps) {
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
  }
  return j;
}

AuditReport Decide(std::vector<PairScore> reference,
                   std::vector<PairScore> modification,
                   const AuditConfig& cfg) {
  cfg.Validate();
  if (modification.empty()) throw ConfigError("modification set is empty");
  SortById(reference);
  SortById(modification);

  AuditReport report;
  report.config_hash = cfg.Hash();
  report.alpha = cfg.alpha;
  for (PairScore& s : reference) s.diff = s.p_original - s.p_modified;
  const std::vector<double> ds_r = [&] {
    std::vector<double> v;
    for (const PairScore& s : reference) v.push_back(s.diff);
    return v;
  }();
  const Threshold t =
      ReferenceThreshold(ds_r, cfg.clip_bound, cfg.clip_threshold);
  report.h_bar = t.h_bar;
  report.h = t.h;
  report.clipped = t.h != t.h_bar;

  const double b = cfg.low_prob_bound();
  std::vector<double> ds_m;
  for (PairScore& s : modification) {
    s.postprocessed = cfg.postprocess && s.p_modified < b && s.p_original < b;
    s.diff = cfg.postprocess
                 ? PostprocessDiff(s.p_modified, s.p_original, b, cfg.beta,
                                   t.h_bar)
                 : s.p_original - s.p_modified;
    if (s.postprocessed) ++report.postprocessed_count;
    ds_m.push_back(s.diff);
  }
  report.test = WilcoxonOneSided(ds_m, t.h, cfg.alpha);
  report.decision = report.test.reject && report.test.n_effective >= 1
                        ? Decision::kMisuse
                        : Decision::kNoMisuse;

  const int need = MinimumRejectableN(cfg.alpha);
  if (int(modification.size()) < need) {
    report.warnings.push_back(
        "modification set has " + std::to_string(modification.size()) +
        " samples; at alpha = " + std::to_string(cfg.alpha) + " at least " +
        std::to_string(need) + " are needed to ever reject");
  }
  if (report.test.degenerate) {
    report.warnings.push_back(
        "every modification difference equals the threshold; no test "
        "performed");
  } else if (report.test.underpowered) {
    report.warnings.push_back(
        "only " + std::to_string(report.test.n_effective) +
        " non-zero differences; the minimum attainable p-value is not below "
        "alpha");
  }
  report.reference = std::move(reference);
  report.modification = std::move(modification);
  return report;
}

AuditReport Audit(const Oracle& suspect, const DatasetManifest& manifest,
                  const DatasetPair& pair, const AuditConfig& cfg,
                  const AuditOptions& options) {
  cfg.Validate();
  const std::string started = UtcNow();
  struct Task {
    const PairEntry* entry;
    bool reference;
  };
  std::vector<Task> tasks;
  for (Assignment a : {Assignment::kReference, Assignment::kModification}) {
    const std::vector<std::string> ids = manifest.IdsOf(a);
    if (ids.empty()) {
      throw ConfigError(std::string("manifest has an empty ") +
                        std::string(AssignmentName(a)) + " set");
    }
    for (const std::string& id : ids) {
      const PairEntry* e = pair.Find(id);
      if (e == nullptr) {
        throw IntegrityError("sample '" + id + "' missing from dataset pair");
      }
      if (e->assignment != a || e->label != manifest.Find(id)->label) {
        throw IntegrityError("sample '" + id +
                             "' disagrees between manifest and pair");
      }
      tasks.push_back({e, a == Assignment::kReference});
    }
  }
  const int64_t needed = 2 * int64_t(tasks.size());
  if (options.query_limit && *options.query_limit < needed) {
    throw BudgetError("audit needs " + std::to_string(needed) +
                      " queries but the limit is " +
                      std::to_string(*options.query_limit));
  }

  std::vector<std::optional<PairScore>> scores(tasks.size());
  std::atomic<int64_t> queries{0};
  auto score = [&](const PairEntry& e, Variant v) {
    queries.fetch_add(1);
    return TrueLabelProb(suspect.Query(QueryId(e.id, v), e.variant(v)),
                         e.label, cfg.num_classes);
  };
  try {
    ParallelFor(tasks.size(), options.jobs, [&](size_t i) {
      const PairEntry& e = *tasks[i].entry;
      PairScore s;
      s.id = e.id;
      s.label = e.label;
      s.p_original = score(e, Variant::kOriginal);
      s.p_modified = score(e, Variant::kModified);
      scores[i] = std::move(s);
    });
  } catch (const std::exception& e) {
    AuditReport partial;
    partial.config_hash = cfg.Hash();
    partial.alpha = cfg.alpha;
    for (size_t i = 0; i < tasks.size(); ++i) {
      if (!scores[i]) continue;
      PairScore s = *scores[i];
      s.diff = s.p_original - s.p_modified;
      (tasks[i].reference ? partial.reference : partial.modification)
          .push_back(std::move(s));
    }
    SortById(partial.reference);
    SortById(partial.modification);
    partial.query_count = queries.load();
    partial.started_at = started;
    partial.finished_at = UtcNow();
    partial.aborted = true;
    partial.abort_reason = e.what();
    const auto* err = dynamic_cast<const Error*>(&e);
    throw AuditAborted(err ? err->kind() : "query",
                       std::string("audit aborted: ") + e.what(),
                       std::move(partial));
  }

  std::vector<PairScore> reference, modification;
  for (size_t i = 0; i < tasks.size(); ++i) {
    (tasks[i].reference ? reference : modification).push_back(*scores[i]);
  }
  AuditReport report = Decide(std::move(reference), std::move(modification), cfg);
  report.query_count = queries.load();
  report.started_at = started;
  report.finished_at = UtcNow();
  return report;
}

}  // namespace vidaudit
