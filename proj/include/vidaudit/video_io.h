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

#ifndef VIDAUDIT_VIDEO_IO_H_
#define VIDAUDIT_VIDEO_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vidaudit/video.h"

namespace vidaudit {

// VTR1 layout: "VTR1", u32 t, u32 h, u32 w, u32 c (all little-endian), then
// t*h*w*c raw bytes in (t, h, w, c) order. Trailing bytes are rejected too.
inline constexpr size_t kVtr1HeaderSize = 20;

std::vector<uint8_t> EncodeVtr1(const VideoTensor& video);
// Throws FormatError on bad magic, short header or wrong payload length.
VideoTensor DecodeVtr1(std::span<const uint8_t> bytes);

void WriteVtr1File(const std::filesystem::path& path, const VideoTensor& video);
VideoTensor ReadVtr1File(const std::filesystem::path& path);

// Loads a directory of frames named frame_NNNNNN.pgm (binary P5, 1 channel)
// or frame_NNNNNN.ppm (binary P6, 3 channels), maxval 255. Frames are
// ordered by plain byte-wise comparison of their file names, so the six
// digit zero padding is what makes the order temporal. Every frame must
// share one size and one format; other files in the directory are ignored.
VideoTensor LoadFrameDirectory(const std::filesystem::path& dir);
// Writes the inverse layout. Used by tests and for inspection.
void WriteFrameDirectory(const std::filesystem::path& dir,
                         const VideoTensor& video);

}  // namespace vidaudit

#endif  // VIDAUDIT_VIDEO_IO_H_
