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

#ifndef VIDAUDIT_VIDEO_H_
#define VIDAUDIT_VIDEO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vidaudit {

// Dimensions of a video: frames x rows x columns x channels.
struct VideoShape {
  int t = 0;
  int h = 0;
  int w = 0;
  int c = 0;

  size_t voxels() const { return size_t(t) * size_t(h) * size_t(w); }
  size_t size() const { return voxels() * size_t(c); }
  bool operator==(const VideoShape&) const = default;
};

// Dense 8-bit video in (t, h, w, c) order. Every value of uint8_t is a
// valid pixel, so the only invariant to guard is the payload length.
class VideoTensor {
 public:
  VideoTensor() = default;
  // All-zero video. Throws ShapeError for non-positive dims or c not in {1,3}.
  explicit VideoTensor(VideoShape shape);
  // Throws ShapeError unless data.size() == shape.size().
  VideoTensor(VideoShape shape, std::vector<uint8_t> data);

  const VideoShape& shape() const { return shape_; }
  int t() const { return shape_.t; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  int c() const { return shape_.c; }

  size_t index(int frame, int row, int col, int channel) const {
    return ((size_t(frame) * shape_.h + row) * shape_.w + col) * shape_.c +
           channel;
  }
  uint8_t at(int frame, int row, int col, int channel) const {
    return data_[index(frame, row, col, channel)];
  }
  uint8_t& at(int frame, int row, int col, int channel) {
    return data_[index(frame, row, col, channel)];
  }

  std::span<const uint8_t> data() const { return data_; }
  std::span<uint8_t> mutable_data() { return data_; }

  bool operator==(const VideoTensor&) const = default;

 private:
  VideoShape shape_;
  std::vector<uint8_t> data_;
};

// Real-valued (t, h, w) field broadcast across the channels of a video.
class NoiseField {
 public:
  NoiseField() = default;
  NoiseField(int t, int h, int w);  // zero-filled
  NoiseField(int t, int h, int w, std::vector<double> data);

  int t() const { return t_; }
  int h() const { return h_; }
  int w() const { return w_; }
  size_t size() const { return data_.size(); }

  size_t index(int frame, int row, int col) const {
    return (size_t(frame) * h_ + row) * w_ + col;
  }
  double at(int frame, int row, int col) const {
    return data_[index(frame, row, col)];
  }
  double& at(int frame, int row, int col) {
    return data_[index(frame, row, col)];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

 private:
  int t_ = 0;
  int h_ = 0;
  int w_ = 0;
  std::vector<double> data_;
};

// Adds the signed perturbation epsilon * (2n - 1) of a [0, 1] field to every
// channel, rounds half up and clamps to [0, 255]. The per-pixel change never
// exceeds ceil(epsilon).
//
// Throws ShapeError when the field's (t, h, w) differs from the video's and
// DomainError when epsilon < 0 or a field value lies outside [0, 1].
VideoTensor InjectNoise(const VideoTensor& video, const NoiseField& field,
                        double epsilon);

// Largest absolute per-pixel difference. Throws ShapeError on mismatch.
int MaxAbsDiff(const VideoTensor& a, const VideoTensor& b);

// Mean single-scale SSIM over frames and channels: 11x11 Gaussian window
// (sigma 1.5), K1 = 0.01, K2 = 0.03, L = 255. Near the borders the window is
// truncated to the frame and renormalized, so frames smaller than the
// window are still scored. Throws ShapeError on mismatch.
double Ssim(const VideoTensor& a, const VideoTensor& b);

}  // namespace vidaudit

#endif  // VIDAUDIT_VIDEO_H_
