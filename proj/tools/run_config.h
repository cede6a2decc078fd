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

// Run configuration of the vidaudit tool: the flat "key = value" file
// extended with paths, oracle settings and simulator/bound parameters.
//
// Keys beyond the AuditConfig ones:
//   input_dir, modified_dir, scores, manifest, published_dir,
//   unpublished_dir, predictions, oracle_url, out        paths / endpoint
//   jobs, mode, top_k, quantize_decimals, query_limit,
//   oracle_retries, oracle_timeout_ms                    oracle and workers
//   sim.n_pos, sim.n_neg, sim.seed, sim.dataset_size, sim.frames,
//   sim.height, sim.width, sim.channels, sim.negative, sim.base_true_prob,
//   sim.gap, sim.noise_sigma, sim.level, sim.natural_gap,
//   sim.reference_gap                                    simulator
//   bound.mu0, bound.sigma0, bound.mu1, bound.sigma1, bound.n, bound.a,
//   bound.b, bound.n_M, bound.n_R, bound.delta_h, bound.c_h, bound.mu,
//   bound.f_max, bound.k_pp, bound.sweep_lo, bound.sweep_hi,
//   bound.sweep_steps                                    calculators
// Every other key is rejected.

#ifndef VIDAUDIT_TOOLS_RUN_CONFIG_H_
#define VIDAUDIT_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "vidaudit/config.h"
#include "vidaudit/oracle.h"

namespace vidaudit {

struct RunConfig {
  AuditConfig audit;

  std::optional<std::filesystem::path> input_dir;
  std::optional<std::filesystem::path> modified_dir;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> published_dir;
  std::optional<std::filesystem::path> unpublished_dir;
  std::optional<std::filesystem::path> predictions;
  std::optional<std::string> oracle_url;
  std::optional<std::filesystem::path> out;

  int jobs = 1;
  ResponseMode mode = ResponseMode::kFull;
  int top_k = 5;
  std::optional<int> quantize_decimals;
  std::optional<int64_t> query_limit;
  int oracle_retries = 3;
  int oracle_timeout_ms = 10000;

  // Simulator and calculator keys, kept as text and parsed by the command
  // that uses them.
  std::map<std::string, std::string> sim;
  std::map<std::string, std::string> bound;

  // Throws ConfigError on unknown keys or bad values.
  static RunConfig FromKeyValues(std::map<std::string, std::string> kv);
  static RunConfig FromFile(const std::filesystem::path& path);
};

// Throws ConfigError naming `what` unless `path` is set and is an existing
// directory (or regular file).
const std::filesystem::path& RequireDir(
    const std::optional<std::filesystem::path>& path, const char* what);
const std::filesystem::path& RequireFile(
    const std::optional<std::filesystem::path>& path, const char* what);

}  // namespace vidaudit

#endif  // VIDAUDIT_TOOLS_RUN_CONFIG_H_
