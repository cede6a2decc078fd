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

#ifndef VIDAUDIT_CONFIG_H_
#define VIDAUDIT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "vidaudit/perlin.h"

namespace vidaudit {

// Every tunable of the publish/verify protocol.
struct AuditConfig {
  double epsilon = 10.0;  // l-inf pixel budget
  // Noise shape. perlin.seed is ignored: each sample gets its own seed
  // derived from noise_seed and its id.
  PerlinParams perlin;
  double r_c = 0.10;  // candidate ratio
  double r_m = 0.01;  // modification ratio
  double r_r = 0.01;  // reference ratio
  double clip_bound = 0.05;  // H
  double beta = 0.01;
  double alpha = 0.01;
  int num_classes = 101;  // low-probability bound B = 1 / num_classes
  uint64_t selection_seed = 0;
  uint64_t noise_seed = 0;
  // Ablation switches; both on in the production protocol.
  bool clip_threshold = true;
  bool postprocess = true;

  double low_prob_bound() const { return 1.0 / num_classes; }

  // Throws ConfigError when a field is out of range or r_m + r_r > r_c.
  void Validate() const;

  // Canonical "key = value" lines, sorted by key, with %.17g reals.
  std::string Canonical() const;
  // 16 hex digits of a hash over Canonical().
  std::string Hash() const;
};

// Parses the flat config grammar: one "key = value" per line, '#' starts a
// comment, blank lines are ignored, keys are [A-Za-z0-9_.]+ and may appear
// once. Throws ConfigError with the offending line number.
std::map<std::string, std::string> ParseKeyValueText(std::string_view text);
std::map<std::string, std::string> ParseKeyValueFile(
    const std::filesystem::path& path);

// Applies recognised AuditConfig keys, erasing them from `kv`. Keys:
// epsilon, lambda_x, lambda_y, lambda_t, phi_sine, omega, r_c, r_m, r_r, H,
// beta, alpha, n_c, selection_seed, noise_seed, clip, postprocess.
void ApplyAuditConfigKeys(std::map<std::string, std::string>& kv,
                          AuditConfig& cfg);

// Typed value parsers. All throw ConfigError naming the key.
double ParseDouble(std::string_view key, std::string_view value);
int64_t ParseInt(std::string_view key, std::string_view value);
uint64_t ParseUint64(std::string_view key, std::string_view value);
bool ParseBool(std::string_view key, std::string_view value);

}  // namespace vidaudit

#endif  // VIDAUDIT_CONFIG_H_
