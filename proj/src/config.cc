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

#include "vidaudit/config.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vidaudit/errors.h"
#include "vidaudit/hash.h"

namespace vidaudit {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool ValidKey(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') {
      return false;
    }
  }
  return true;
}

std::string Real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void AuditConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!std::isfinite(epsilon) || epsilon < 0) fail("epsilon must be >= 0");
  try {
    perlin.Validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
  for (auto [name, r] : {std::pair{"r_c", r_c}, {"r_m", r_m}, {"r_r", r_r}}) {
    if (!(r > 0.0 && r <= 1.0)) fail(std::string(name) + " must be in (0, 1]");
  }
  if (r_m + r_r > r_c + 1e-12) fail("r_m + r_r must not exceed r_c");
  if (!std::isfinite(clip_bound) || clip_bound < 0) fail("H must be >= 0");
  if (!std::isfinite(beta) || beta <= 0) fail("beta must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0, 1)");
  if (num_classes < 2) fail("n_c must be >= 2");
}

std::string AuditConfig::Canonical() const {
  std::map<std::string, std::string> kv = {
      {"H", Real(clip_bound)},
      {"alpha", Real(alpha)},
      {"beta", Real(beta)},
      {"clip", clip_threshold ? "true" : "false"},
      {"epsilon", Real(epsilon)},
      {"lambda_t", Real(perlin.lambda_t)},
      {"lambda_x", Real(perlin.lambda_x)},
      {"lambda_y", Real(perlin.lambda_y)},
      {"n_c", std::to_string(num_classes)},
      {"noise_seed", std::to_string(noise_seed)},
      {"omega", std::to_string(perlin.omega)},
      {"phi_sine", Real(perlin.phi_sine)},
      {"postprocess", postprocess ? "true" : "false"},
      {"r_c", Real(r_c)},
      {"r_m", Real(r_m)},
      {"r_r", Real(r_r)},
      {"selection_seed", std::to_string(selection_seed)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string AuditConfig::Hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(Canonical())));
  return buf;
}

std::map<std::string, std::string> ParseKeyValueText(std::string_view text) {
  std::map<std::string, std::string> kv;
  int line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (!ValidKey(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::map<std::string, std::string> ParseKeyValueFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseKeyValueText(buf.str());
}

double ParseDouble(std::string_view key, std::string_view value) {
  double v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                      "' is not a finite number");
  }
  return v;
}

int64_t ParseInt(std::string_view key, std::string_view value) {
  int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                      "' is not an integer");
  }
  return v;
}

uint64_t ParseUint64(std::string_view key, std::string_view value) {
  uint64_t v = 0;
  int base = 10;
  std::string_view digits = value;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    digits.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || ec != std::errc() ||
      ptr != digits.data() + digits.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                      "' is not an unsigned 64-bit integer");
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                    "' is not a boolean");
}

void ApplyAuditConfigKeys(std::map<std::string, std::string>& kv,
                          AuditConfig& cfg) {
  auto take = [&kv](const char* key, auto&& apply) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    apply(it->first, it->second);
    kv.erase(it);
  };
  using S = const std::string&;
  take("epsilon", [&](S k, S v) { cfg.epsilon = ParseDouble(k, v); });
  take("lambda_x", [&](S k, S v) { cfg.perlin.lambda_x = ParseDouble(k, v); });
  take("lambda_y", [&](S k, S v) { cfg.perlin.lambda_y = ParseDouble(k, v); });
  take("lambda_t", [&](S k, S v) { cfg.perlin.lambda_t = ParseDouble(k, v); });
  take("phi_sine", [&](S k, S v) { cfg.perlin.phi_sine = ParseDouble(k, v); });
  take("omega", [&](S k, S v) { cfg.perlin.omega = int(ParseInt(k, v)); });
  take("r_c", [&](S k, S v) { cfg.r_c = ParseDouble(k, v); });
  take("r_m", [&](S k, S v) { cfg.r_m = ParseDouble(k, v); });
  take("r_r", [&](S k, S v) { cfg.r_r = ParseDouble(k, v); });
  take("H", [&](S k, S v) { cfg.clip_bound = ParseDouble(k, v); });
  take("beta", [&](S k, S v) { cfg.beta = ParseDouble(k, v); });
  take("alpha", [&](S k, S v) { cfg.alpha = ParseDouble(k, v); });
  take("n_c", [&](S k, S v) { cfg.num_classes = int(ParseInt(k, v)); });
  take("selection_seed", [&](S k, S v) { cfg.selection_seed = ParseUint64(k, v); });
  take("noise_seed", [&](S k, S v) { cfg.noise_seed = ParseUint64(k, v); });
  take("clip", [&](S k, S v) { cfg.clip_threshold = ParseBool(k, v); });
  take("postprocess", [&](S k, S v) { cfg.postprocess = ParseBool(k, v); });
}

}  // namespace vidaudit
