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

// Black-box prediction oracles.
//
// Every oracle answers Query(id, video) with one of three response shapes:
// a full posterior, a ranked top-K label list, or a single label. The id is
// "<sample id>:original" or "<sample id>:modified" when issued by the
// pipeline or the verifier; pixel-only oracles are free to ignore it.
//
// Wire schema shared by the file-backed oracle, the remote oracle and the
// prediction handler:
//
//   {"mode": "full",  "probs": [p0, p1, ...], "quantized": false?}
//   {"mode": "topk",  "topk": [{"label": 3, "rank": 1}, ...]}
//   {"mode": "label", "label": 3}

#ifndef VIDAUDIT_ORACLE_H_
#define VIDAUDIT_ORACLE_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vidaudit/posterior.h"
#include "vidaudit/video.h"

namespace vidaudit {

enum class ResponseMode { kFull, kTopK, kLabel };

std::string_view ResponseModeName(ResponseMode mode);
// Accepts "full", "topk" and "label". Throws ConfigError otherwise.
ResponseMode ParseResponseMode(std::string_view name);

struct RankedLabel {
  int label = 0;
  int rank = 0;  // 1-based
  bool operator==(const RankedLabel&) const = default;
};

struct OracleResponse {
  ResponseMode mode = ResponseMode::kFull;
  PosteriorVector full;           // kFull
  std::vector<RankedLabel> topk;  // kTopK, any order
  int label = -1;                 // kLabel

  static OracleResponse Full(PosteriorVector p);
  static OracleResponse TopK(std::vector<RankedLabel> ranked);
  static OracleResponse Label(int label);

  // Throws DomainError: invalid posterior, top-K ranks not exactly 1..K,
  // duplicate or negative labels.
  void Validate() const;
};

// Score of `label` in a response, in [0, 1]:
//   full  -> probs[label]
//   topk  -> (1 / r) / H_K if label has rank r among K entries, else 0,
//            with H_K the K-th harmonic number
//   label -> 1 if the predicted label matches, else 0
// Throws DomainError when label is outside [0, num_classes) or a full
// posterior has a different class count.
double TrueLabelProb(const OracleResponse& r, int label, int num_classes);

// Top-K view of a posterior, highest probability first; equal probabilities
// rank the lower class id first. K is capped at the class count.
OracleResponse ToTopK(const PosteriorVector& p, int k);
OracleResponse ToLabelOnly(const PosteriorVector& p);

nlohmann::json ResponseToJson(const OracleResponse& r);
// Throws QueryError on any schema violation.
OracleResponse ResponseFromJson(const nlohmann::json& j);

enum class Variant { kOriginal, kModified };

std::string_view VariantName(Variant v);
std::string QueryId(std::string_view sample_id, Variant v);

// Implementations must be safe for concurrent Query calls.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleResponse Query(const std::string& id,
                               const VideoTensor& video) const = 0;
};

// Table lookup by query id. Throws MissingPredictionError for unknown ids.
class FileOracle : public Oracle {
 public:
  explicit FileOracle(std::map<std::string, OracleResponse> table);

  // JSON object mapping query id -> response. Throws FormatError when the
  // file cannot be read or parsed, QueryError on schema violations.
  static FileOracle FromJson(const nlohmann::json& j);
  static FileOracle FromFile(const std::filesystem::path& path);

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

  const std::map<std::string, OracleResponse>& table() const { return table_; }

 private:
  std::map<std::string, OracleResponse> table_;
};

struct RemoteOracleOptions {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds timeout{10000};
};

// POSTs {"id", "video_b64"} to <base_url>/predict. Transport failures and
// 5xx responses are retried with exponential backoff; any other non-200
// status or a malformed body fails immediately with QueryError.
class RemoteOracle : public Oracle {
 public:
  // base_url is "http://host:port" with an optional path prefix.
  explicit RemoteOracle(std::string base_url, RemoteOracleOptions options = {});

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

 private:
  std::string scheme_host_port_;
  std::string path_prefix_;
  RemoteOracleOptions options_;
};

// Enforces a per-audit query budget and counts queries. A limit < 0 means
// unlimited. Throws BudgetError once the limit would be exceeded.
class BudgetedOracle : public Oracle {
 public:
  BudgetedOracle(const Oracle& inner, int64_t limit);

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

  int64_t query_count() const { return count_.load(); }

 private:
  const Oracle& inner_;
  int64_t limit_;
  mutable std::atomic<int64_t> count_{0};
};

// Rounds full posteriors returned by `inner`; other modes pass through.
class QuantizingOracle : public Oracle {
 public:
  QuantizingOracle(const Oracle& inner, int decimals);

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

 private:
  const Oracle& inner_;
  int decimals_;
};

// Reduces full posteriors to top-K or label-only answers, modelling an
// endpoint that exposes less information.
class RestrictingOracle : public Oracle {
 public:
  RestrictingOracle(const Oracle& inner, ResponseMode mode, int k = 5);

  OracleResponse Query(const std::string& id,
                       const VideoTensor& video) const override;

 private:
  const Oracle& inner_;
  ResponseMode mode_;
  int k_;
};

}  // namespace vidaudit

#endif  // VIDAUDIT_ORACLE_H_
