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

#include "vidaudit/oracle.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include "httplib.h"
#include "vidaudit/base64.h"
#include "vidaudit/errors.h"
#include "vidaudit/video_io.h"

namespace vidaudit {
namespace {

using nlohmann::json;

int JsonInt(const json& j, const char* what) {
  if (!j.is_number_integer()) {
    throw QueryError(std::string("'") + what + "' must be an integer");
  }
  return j.get<int>();
}

}  // namespace

std::string_view ResponseModeName(ResponseMode mode) {
  switch (mode) {
    case ResponseMode::kFull:
      return "full";
    case ResponseMode::kTopK:
      return "topk";
    case ResponseMode::kLabel:
      return "label";
  }
  return "full";
}

ResponseMode ParseResponseMode(std::string_view name) {
  if (name == "full") return ResponseMode::kFull;
  if (name == "topk") return ResponseMode::kTopK;
  if (name == "label") return ResponseMode::kLabel;
  throw ConfigError("unknown response mode '" + std::string(name) + "'");
}

OracleResponse OracleResponse::Full(PosteriorVector p) {
  OracleResponse r;
  r.mode = ResponseMode::kFull;
  r.full = std::move(p);
  return r;
}

OracleResponse OracleResponse::TopK(std::vector<RankedLabel> ranked) {
  OracleResponse r;
  r.mode = ResponseMode::kTopK;
  r.topk = std::move(ranked);
  return r;
}

OracleResponse OracleResponse::Label(int label) {
  OracleResponse r;
  r.mode = ResponseMode::kLabel;
  r.label = label;
  return r;
}

void OracleResponse::Validate() const {
  switch (mode) {
    case ResponseMode::kFull:
      full.Validate();
      return;
    case ResponseMode::kTopK: {
      if (topk.empty()) throw DomainError("top-K response is empty");
      std::vector<bool> seen_rank(topk.size() + 1, false);
      std::set<int> labels;
      for (const RankedLabel& e : topk) {
        if (e.rank < 1 || e.rank > int(topk.size()) || seen_rank[e.rank]) {
          throw DomainError("top-K ranks must be exactly 1..K");
        }
        seen_rank[e.rank] = true;
        if (e.label < 0 || !labels.insert(e.label).second) {
          throw DomainError("top-K labels must be distinct and >= 0");
        }
      }
      return;
    }
    case ResponseMode::kLabel:
      if (label < 0) throw DomainError("label must be >= 0");
      return;
  }
}

double TrueLabelProb(const OracleResponse& r, int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw DomainError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
  }
  switch (r.mode) {
    case ResponseMode::kFull:
      if (r.full.num_classes() != num_classes) {
        throw DomainError("posterior has " +
                          std::to_string(r.full.num_classes()) +
                          " classes, expected " + std::to_string(num_classes));
      }
      return r.full.probs[size_t(label)];
    case ResponseMode::kTopK: {
      double harmonic = 0.0;
      for (size_t i = 1; i <= r.topk.size(); ++i) harmonic += 1.0 / double(i);
      for (const RankedLabel& e : r.topk) {
        if (e.label == label) return (1.0 / e.rank) / harmonic;
      }
      return 0.0;
    }
    case ResponseMode::kLabel:
      return r.label == label ? 1.0 : 0.0;
  }
  return 0.0;
}

OracleResponse ToTopK(const PosteriorVector& p, int k) {
  if (k < 1) throw DomainError("K must be >= 1");
  std::vector<int> order(p.probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&p](int a, int b) {
    return p.probs[size_t(a)] > p.probs[size_t(b)];
  });
  const int kept = std::min<int>(k, int(order.size()));
  std::vector<RankedLabel> ranked;
  ranked.reserve(size_t(kept));
  for (int i = 0; i < kept; ++i) ranked.push_back({order[size_t(i)], i + 1});
  return OracleResponse::TopK(std::move(ranked));
}

OracleResponse ToLabelOnly(const PosteriorVector& p) {
  return OracleResponse::Label(ToTopK(p, 1).topk.front().label);
}

json ResponseToJson(const OracleResponse& r) {
  json j;
  j["mode"] = std::string(ResponseModeName(r.mode));
  switch (r.mode) {
    case ResponseMode::kFull:
      j["probs"] = r.full.probs;
      if (r.full.quantized) j["quantized"] = true;
      break;
    case ResponseMode::kTopK: {
      json list = json::array();
      for (const RankedLabel& e : r.topk) {
        list.push_back({{"label", e.label}, {"rank", e.rank}});
      }
      j["topk"] = std::move(list);
      break;
    }
    case ResponseMode::kLabel:
      j["label"] = r.label;
      break;
  }
  return j;
}

OracleResponse ResponseFromJson(const json& j) {
  if (!j.is_object()) throw QueryError("response must be a JSON object");
  const auto mode_it = j.find("mode");
  if (mode_it == j.end() || !mode_it->is_string()) {
    throw QueryError("response lacks a string 'mode'");
  }
  OracleResponse r;
  const std::string mode = mode_it->get<std::string>();
  if (mode == "full") {
    const auto probs = j.find("probs");
    if (probs == j.end() || !probs->is_array()) {
      throw QueryError("full response lacks 'probs' array");
    }
    PosteriorVector p;
    for (const json& v : *probs) {
      if (!v.is_number()) throw QueryError("'probs' entries must be numbers");
      p.probs.push_back(v.get<double>());
    }
    if (const auto q = j.find("quantized"); q != j.end()) {
      if (!q->is_boolean()) throw QueryError("'quantized' must be boolean");
      p.quantized = q->get<bool>();
    }
    r = OracleResponse::Full(std::move(p));
  } else if (mode == "topk") {
    const auto list = j.find("topk");
    if (list == j.end() || !list->is_array()) {
      throw QueryError("topk response lacks 'topk' array");
    }
    std::vector<RankedLabel> ranked;
    for (const json& e : *list) {
      if (!e.is_object() || !e.contains("label") || !e.contains("rank")) {
        throw QueryError("topk entries need 'label' and 'rank'");
      }
      ranked.push_back({JsonInt(e["label"], "label"), JsonInt(e["rank"], "rank")});
    }
    r = OracleResponse::TopK(std::move(ranked));
  } else if (mode == "label") {
    const auto label = j.find("label");
    if (label == j.end()) throw QueryError("label response lacks 'label'");
    r = OracleResponse::Label(JsonInt(*label, "label"));
  } else {
    throw QueryError("unknown response mode '" + mode + "'");
  }
  try {
    r.Validate();
  } catch (const DomainError& e) {
    throw QueryError(std::string("invalid response: ") + e.what());
  }
  return r;
}

std::string_view VariantName(Variant v) {
  return v == Variant::kOriginal ? "original" : "modified";
}

std::string QueryId(std::string_view sample_id, Variant v) {
  std::string id(sample_id);
  id += ':';
  id += VariantName(v);
  return id;
}

FileOracle::FileOracle(std::map<std::string, OracleResponse> table)
    : table_(std::move(table)) {}

FileOracle FileOracle::FromJson(const json& j) {
  if (!j.is_object()) {
    throw FormatError("prediction table must be a JSON object");
  }
  std::map<std::string, OracleResponse> table;
  for (const auto& [id, value] : j.items()) {
    try {
      table.emplace(id, ResponseFromJson(value));
    } catch (const QueryError& e) {
      throw QueryError("prediction for '" + id + "': " + e.what());
    }
  }
  return FileOracle(std::move(table));
}

FileOracle FileOracle::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return FromJson(j);
}

OracleResponse FileOracle::Query(const std::string& id,
                                 const VideoTensor& /*video*/) const {
  const auto it = table_.find(id);
  if (it == table_.end()) throw MissingPredictionError(id);
  return it->second;
}

RemoteOracle::RemoteOracle(std::string base_url, RemoteOracleOptions options)
    : options_(options) {
  const size_t scheme = base_url.find("://");
  if (scheme == std::string::npos || base_url.compare(0, scheme, "http") != 0) {
    throw ConfigError("oracle URL must start with http://, got '" + base_url +
                      "'");
  }
  const size_t path = base_url.find('/', scheme + 3);
  scheme_host_port_ = base_url.substr(0, path);
  if (path != std::string::npos) path_prefix_ = base_url.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

OracleResponse RemoteOracle::Query(const std::string& id,
                                   const VideoTensor& video) const {
  const std::string body =
      json{{"id", id}, {"video_b64", Base64Encode(EncodeVtr1(video))}}.dump();
  const std::string target = path_prefix_ + "/predict";
  const auto timeout = options_.timeout;

  std::string last_failure;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.initial_backoff * (1 << (attempt - 1)));
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const httplib::Result res =
        client.Post(target, body, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "server returned " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw QueryError("query '" + id + "': server returned " +
                       std::to_string(res->status));
    }
    json j = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw QueryError("query '" + id + "': response body is not JSON");
    }
    try {
      return ResponseFromJson(j);
    } catch (const QueryError& e) {
      throw QueryError("query '" + id + "': " + e.what());
    }
  }
  throw QueryError("query '" + id + "' failed after " +
                       std::to_string(options_.max_retries + 1) +
                       " attempts: " + last_failure,
                   /*retryable=*/true);
}

BudgetedOracle::BudgetedOracle(const Oracle& inner, int64_t limit)
    : inner_(inner), limit_(limit) {}

OracleResponse BudgetedOracle::Query(const std::string& id,
                                     const VideoTensor& video) const {
  const int64_t n = count_.fetch_add(1) + 1;
  if (limit_ >= 0 && n > limit_) {
    count_.fetch_sub(1);
    throw BudgetError("query budget of " + std::to_string(limit_) +
                      " exhausted");
  }
  return inner_.Query(id, video);
}

QuantizingOracle::QuantizingOracle(const Oracle& inner, int decimals)
    : inner_(inner), decimals_(decimals) {
  if (decimals < 0) throw ConfigError("quantize decimals must be >= 0");
}

OracleResponse QuantizingOracle::Query(const std::string& id,
                                       const VideoTensor& video) const {
  OracleResponse r = inner_.Query(id, video);
  if (r.mode == ResponseMode::kFull) {
    r.full = QuantizePosterior(r.full, decimals_);
  }
  return r;
}

RestrictingOracle::RestrictingOracle(const Oracle& inner, ResponseMode mode,
                                     int k)
    : inner_(inner), mode_(mode), k_(k) {
  if (k < 1) throw ConfigError("K must be >= 1");
}

OracleResponse RestrictingOracle::Query(const std::string& id,
                                        const VideoTensor& video) const {
  OracleResponse r = inner_.Query(id, video);
  if (r.mode != ResponseMode::kFull || mode_ == ResponseMode::kFull) return r;
  return mode_ == ResponseMode::kTopK ? ToTopK(r.full, k_)
                                      : ToLabelOnly(r.full);
}

}  // namespace vidaudit
