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

#include "vidaudit/video_io.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>
#include <string>

#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t GetU32(std::span<const uint8_t> bytes, size_t at) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(bytes[at + i]) << (8 * i);
  return v;
}

std::vector<uint8_t> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

// Minimal netpbm header reader: magic, width, height, maxval, one
// whitespace byte. Comments start with '#' and run to end of line.
struct PnmImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::span<const uint8_t> pixels;
};

PnmImage ParsePnm(std::span<const uint8_t> bytes, const std::string& name) {
  size_t pos = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError(name + ": " + why);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw fail("malformed header");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1L << 30)) throw fail("header value too large");
    }
    return int(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw fail("expected binary PGM (P5) or PPM (P6)");
  }
  PnmImage img;
  img.channels = bytes[1] == '5' ? 1 : 3;
  pos = 2;
  img.width = read_int();
  img.height = read_int();
  const int maxval = read_int();
  if (maxval != 255) throw fail("only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw fail("malformed header");
  }
  ++pos;
  const size_t need = size_t(img.width) * img.height * img.channels;
  if (img.width < 1 || img.height < 1 || bytes.size() - pos != need) {
    throw fail("pixel payload has wrong length");
  }
  img.pixels = bytes.subspan(pos, need);
  return img;
}

}  // namespace

std::vector<uint8_t> EncodeVtr1(const VideoTensor& video) {
  std::vector<uint8_t> out = {'V', 'T', 'R', '1'};
  out.reserve(kVtr1HeaderSize + video.data().size());
  PutU32(out, uint32_t(video.t()));
  PutU32(out, uint32_t(video.h()));
  PutU32(out, uint32_t(video.w()));
  PutU32(out, uint32_t(video.c()));
  out.insert(out.end(), video.data().begin(), video.data().end());
  return out;
}

VideoTensor DecodeVtr1(std::span<const uint8_t> bytes) {
  if (bytes.size() < kVtr1HeaderSize) throw FormatError("VTR1 header truncated");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "VTR1")) {
    throw FormatError("bad VTR1 magic");
  }
  const uint32_t t = GetU32(bytes, 4), h = GetU32(bytes, 8),
                 w = GetU32(bytes, 12), c = GetU32(bytes, 16);
  if (t == 0 || h == 0 || w == 0 || (c != 1 && c != 3) || t > (1u << 24) ||
      h > (1u << 16) || w > (1u << 16)) {
    throw FormatError("VTR1 header has invalid dims");
  }
  const uint64_t payload = uint64_t(t) * h * w * c;
  if (bytes.size() - kVtr1HeaderSize != payload) {
    throw FormatError("VTR1 payload has " +
                      std::to_string(bytes.size() - kVtr1HeaderSize) +
                      " bytes, expected " + std::to_string(payload));
  }
  return VideoTensor(VideoShape{int(t), int(h), int(w), int(c)},
                     std::vector<uint8_t>(bytes.begin() + kVtr1HeaderSize,
                                          bytes.end()));
}

void WriteVtr1File(const std::filesystem::path& path,
                   const VideoTensor& video) {
  const std::vector<uint8_t> bytes = EncodeVtr1(video);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

VideoTensor ReadVtr1File(const std::filesystem::path& path) {
  try {
    return DecodeVtr1(ReadAll(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

VideoTensor LoadFrameDirectory(const std::filesystem::path& dir) {
  static const std::regex kFrameName(R"(frame_\d{6}\.(pgm|ppm))");
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError(dir.string() + " is not a directory");
  }
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, kFrameName)) {
      names.push_back(name);
    }
  }
  if (names.empty()) throw FormatError(dir.string() + " holds no frames");
  std::sort(names.begin(), names.end());

  std::vector<uint8_t> data;
  VideoShape shape;
  for (const std::string& name : names) {
    const std::vector<uint8_t> bytes = ReadAll(dir / name);
    const PnmImage img = ParsePnm(bytes, name);
    if (shape.t == 0) {
      shape = VideoShape{0, img.height, img.width, img.channels};
    } else if (img.height != shape.h || img.width != shape.w ||
               img.channels != shape.c) {
      throw FormatError(name + ": frame size or format differs from first frame");
    }
    data.insert(data.end(), img.pixels.begin(), img.pixels.end());
    ++shape.t;
  }
  return VideoTensor(shape, std::move(data));
}

void WriteFrameDirectory(const std::filesystem::path& dir,
                         const VideoTensor& video) {
  std::filesystem::create_directories(dir);
  const bool gray = video.c() == 1;
  const size_t frame_bytes = size_t(video.h()) * video.w() * video.c();
  for (int f = 0; f < video.t(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.%s", f, gray ? "pgm" : "ppm");
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + (dir / name).string());
    out << (gray ? "P5" : "P6") << "\n"
        << video.w() << " " << video.h() << "\n255\n";
    out.write(reinterpret_cast<const char*>(video.data().data() + f * frame_bytes),
              std::streamsize(frame_bytes));
  }
}

}  // namespace vidaudit
