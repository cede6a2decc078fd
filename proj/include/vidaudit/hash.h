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

#ifndef VIDAUDIT_HASH_H_
#define VIDAUDIT_HASH_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace vidaudit {

// splitmix64 finalizer. Bijective on 64-bit integers.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of two words.
constexpr uint64_t HashCombine(uint64_t seed, uint64_t value) {
  return Mix64(seed ^ Mix64(value + 0x632be59bd9b4e019ULL));
}

template <typename... Words>
constexpr uint64_t HashWords(uint64_t seed, Words... words) {
  uint64_t h = seed;
  ((h = HashCombine(h, static_cast<uint64_t>(words))), ...);
  return h;
}

// FNV-1a over bytes, finalized with Mix64 for better low-bit avalanche.
uint64_t HashBytes(std::span<const uint8_t> bytes);
uint64_t HashString(std::string_view text);

// Maps a hash to a double uniformly distributed in (0, 1).
constexpr double ToUnitOpen(uint64_t h) {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace vidaudit

#endif  // VIDAUDIT_HASH_H_
