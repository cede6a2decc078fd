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

#include "run_config.h"

#include <set>

#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

const std::set<std::string>& SimKeys() {
  static const std::set<std::string> keys = {
      "sim.n_pos",       "sim.n_neg",         "sim.seed",
      "sim.dataset_size", "sim.frames",       "sim.height",
      "sim.width",       "sim.channels",      "sim.negative",
      "sim.base_true_prob", "sim.gap",        "sim.noise_sigma",
      "sim.level",       "sim.natural_gap",   "sim.reference_gap"};
  return keys;
}

const std::set<std::string>& BoundKeys() {
  static const std::set<std::string> keys = {
      "bound.mu0",     "bound.sigma0",   "bound.mu1",        "bound.sigma1",
      "bound.n",       "bound.a",        "bound.b",          "bound.n_M",
      "bound.n_R",     "bound.delta_h",  "bound.c_h",        "bound.mu",
      "bound.f_max",   "bound.k_pp",     "bound.sweep_lo",   "bound.sweep_hi",
      "bound.sweep_steps"};
  return keys;
}

}  // namespace

RunConfig RunConfig::FromKeyValues(std::map<std::string, std::string> kv) {
  RunConfig rc;
  ApplyAuditConfigKeys(kv, rc.audit);
  auto take = [&kv](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto path = [&](const char* key, std::optional<std::filesystem::path>& dst) {
    if (auto v = take(key)) {
      if (v->empty()) throw ConfigError("key '" + std::string(key) + "' is empty");
      dst = *v;
    }
  };
  path("input_dir", rc.input_dir);
  path("modified_dir", rc.modified_dir);
  path("scores", rc.scores);
  path("manifest", rc.manifest);
  path("published_dir", rc.published_dir);
  path("unpublished_dir", rc.unpublished_dir);
  path("predictions", rc.predictions);
  path("out", rc.out);
  if (auto v = take("oracle_url")) rc.oracle_url = *v;
  if (auto v = take("jobs")) rc.jobs = int(ParseInt("jobs", *v));
  if (auto v = take("mode")) {
    try {
      rc.mode = ParseResponseMode(*v);
    } catch (const Error& e) {
      throw ConfigError(std::string("key 'mode': ") + e.what());
    }
  }
  if (auto v = take("top_k")) rc.top_k = int(ParseInt("top_k", *v));
  if (auto v = take("quantize_decimals")) {
    rc.quantize_decimals = int(ParseInt("quantize_decimals", *v));
  }
  if (auto v = take("query_limit")) rc.query_limit = ParseInt("query_limit", *v);
  if (auto v = take("oracle_retries")) {
    rc.oracle_retries = int(ParseInt("oracle_retries", *v));
  }
  if (auto v = take("oracle_timeout_ms")) {
    rc.oracle_timeout_ms = int(ParseInt("oracle_timeout_ms", *v));
  }
  for (auto it = kv.begin(); it != kv.end();) {
    if (SimKeys().count(it->first)) {
      rc.sim.insert(*it);
    } else if (BoundKeys().count(it->first)) {
      rc.bound.insert(*it);
    } else {
      throw ConfigError("unknown config key '" + it->first + "'");
    }
    it = kv.erase(it);
  }
  if (rc.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (rc.top_k < 1) throw ConfigError("top_k must be >= 1");
  if (rc.quantize_decimals && *rc.quantize_decimals < 0) {
    throw ConfigError("quantize_decimals must be >= 0");
  }
  if (rc.query_limit && *rc.query_limit < 0) {
    throw ConfigError("query_limit must be >= 0");
  }
  if (rc.oracle_retries < 0 || rc.oracle_timeout_ms < 1) {
    throw ConfigError("oracle_retries must be >= 0, oracle_timeout_ms >= 1");
  }
  rc.audit.Validate();
  return rc;
}

RunConfig RunConfig::FromFile(const std::filesystem::path& path) {
  RunConfig rc = FromKeyValues(ParseKeyValueFile(path));
  // Relative paths in a config file are relative to the file.
  const std::filesystem::path base = path.parent_path();
  for (auto* p : {&rc.input_dir, &rc.modified_dir, &rc.scores, &rc.manifest,
                  &rc.published_dir, &rc.unpublished_dir, &rc.predictions,
                  &rc.out}) {
    if (*p && p->value().is_relative()) *p = base / p->value();
  }
  return rc;
}

const std::filesystem::path& RequireDir(
    const std::optional<std::filesystem::path>& path, const char* what) {
  if (!path) throw ConfigError(std::string(what) + " is not set");
  if (!std::filesystem::is_directory(*path)) {
    throw ConfigError(std::string(what) + " " + path->string() +
                      " is not a directory");
  }
  return *path;
}

const std::filesystem::path& RequireFile(
    const std::optional<std::filesystem::path>& path, const char* what) {
  if (!path) throw ConfigError(std::string(what) + " is not set");
  if (!std::filesystem::is_regular_file(*path)) {
    throw ConfigError(std::string(what) + " " + path->string() +
                      " is not a readable file");
  }
  return *path;
}

}  // namespace vidaudit
