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

#ifndef VIDAUDIT_BASE64_H_
#define VIDAUDIT_BASE64_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vidaudit {

// RFC 4648 standard alphabet with '=' padding.
std::string Base64Encode(std::span<const uint8_t> bytes);
// Throws FormatError on characters outside the alphabet or bad padding.
std::vector<uint8_t> Base64Decode(std::string_view text);

}  // namespace vidaudit

#endif  // VIDAUDIT_BASE64_H_
