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

#include "vidaudit/video.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "vidaudit/errors.h"

namespace vidaudit {
namespace {

void CheckShape(const VideoShape& s) {
  if (s.t < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("video dims must be >= 1, got " + std::to_string(s.t) +
                     "x" + std::to_string(s.h) + "x" + std::to_string(s.w));
  }
  if (s.c != 1 && s.c != 3) {
    throw ShapeError("video must have 1 or 3 channels, got " +
                     std::to_string(s.c));
  }
}

std::string DimString(int t, int h, int w) {
  return std::to_string(t) + "x" + std::to_string(h) + "x" +
         std::to_string(w);
}

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

std::array<double, kWindow> GaussianTaps() {
  std::array<double, kWindow> taps{};
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    taps[i] = std::exp(-d * d / (2 * kSigma * kSigma));
  }
  return taps;
}

// Separable Gaussian blur of an h x w plane, truncating the window at the
// borders and renormalizing the taps that remain.
void Blur(const std::vector<double>& in, int h, int w,
          std::vector<double>& tmp, std::vector<double>& out) {
  static const std::array<double, kWindow> taps = GaussianTaps();
  tmp.assign(in.size(), 0.0);
  out.assign(in.size(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0, norm = 0.0;
      const int lo = std::max(0, c - kRadius), hi = std::min(w - 1, c + kRadius);
      for (int k = lo; k <= hi; ++k) {
        const double tap = taps[k - c + kRadius];
        acc += tap * in[size_t(r) * w + k];
        norm += tap;
      }
      tmp[size_t(r) * w + c] = acc / norm;
    }
  }
  for (int r = 0; r < h; ++r) {
    const int lo = std::max(0, r - kRadius), hi = std::min(h - 1, r + kRadius);
    for (int c = 0; c < w; ++c) {
      double acc = 0.0, norm = 0.0;
      for (int k = lo; k <= hi; ++k) {
        const double tap = taps[k - r + kRadius];
        acc += tap * tmp[size_t(k) * w + c];
        norm += tap;
      }
      out[size_t(r) * w + c] = acc / norm;
    }
  }
}

}  // namespace

VideoTensor::VideoTensor(VideoShape shape) : shape_(shape) {
  CheckShape(shape_);
  data_.assign(shape_.size(), 0);
}

VideoTensor::VideoTensor(VideoShape shape, std::vector<uint8_t> data)
    : shape_(shape), data_(std::move(data)) {
  CheckShape(shape_);
  if (data_.size() != shape_.size()) {
    throw ShapeError("video payload has " + std::to_string(data_.size()) +
                     " bytes, expected " + std::to_string(shape_.size()));
  }
}

NoiseField::NoiseField(int t, int h, int w)
    : NoiseField(t, h, w,
                 std::vector<double>(size_t(std::max(t, 0)) *
                                         size_t(std::max(h, 0)) *
                                         size_t(std::max(w, 0)),
                                     0.0)) {}

NoiseField::NoiseField(int t, int h, int w, std::vector<double> data)
    : t_(t), h_(h), w_(w), data_(std::move(data)) {
  if (t < 1 || h < 1 || w < 1) {
    throw ShapeError("field dims must be >= 1, got " + DimString(t, h, w));
  }
  if (data_.size() != size_t(t) * h * w) {
    throw ShapeError("field payload has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(size_t(t) * h * w));
  }
}

VideoTensor InjectNoise(const VideoTensor& video, const NoiseField& field,
                        double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be finite and >= 0");
  }
  if (field.t() != video.t() || field.h() != video.h() ||
      field.w() != video.w()) {
    throw ShapeError("field " + DimString(field.t(), field.h(), field.w()) +
                     " does not match video " +
                     DimString(video.t(), video.h(), video.w()));
  }
  std::vector<uint8_t> out(video.data().begin(), video.data().end());
  const int channels = video.c();
  const std::span<const double> noise = field.data();
  for (size_t v = 0; v < noise.size(); ++v) {
    const double n = noise[v];
    if (!(n >= 0.0 && n <= 1.0)) {
      throw DomainError("field value " + std::to_string(n) +
                        " outside [0, 1]");
    }
    const double delta = epsilon * (2.0 * n - 1.0);
    for (int ch = 0; ch < channels; ++ch) {
      uint8_t& px = out[v * channels + ch];
      const double shifted = std::floor(double(px) + delta + 0.5);
      px = static_cast<uint8_t>(std::clamp(shifted, 0.0, 255.0));
    }
  }
  return VideoTensor(video.shape(), std::move(out));
}

int MaxAbsDiff(const VideoTensor& a, const VideoTensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("video shapes differ");
  int best = 0;
  const auto da = a.data(), db = b.data();
  for (size_t i = 0; i < da.size(); ++i) {
    best = std::max(best, std::abs(int(da[i]) - int(db[i])));
  }
  return best;
}

double Ssim(const VideoTensor& a, const VideoTensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("video shapes differ");
  const int h = a.h(), w = a.w();
  const size_t plane = size_t(h) * w;
  std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
  std::vector<double> mx, my, mxx, myy, mxy, tmp;
  double total = 0.0;
  for (int f = 0; f < a.t(); ++f) {
    for (int ch = 0; ch < a.c(); ++ch) {
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const size_t i = size_t(r) * w + c;
          x[i] = a.at(f, r, c, ch);
          y[i] = b.at(f, r, c, ch);
          xx[i] = x[i] * x[i];
          yy[i] = y[i] * y[i];
          xy[i] = x[i] * y[i];
        }
      }
      Blur(x, h, w, tmp, mx);
      Blur(y, h, w, tmp, my);
      Blur(xx, h, w, tmp, mxx);
      Blur(yy, h, w, tmp, myy);
      Blur(xy, h, w, tmp, mxy);
      double frame_sum = 0.0;
      for (size_t i = 0; i < plane; ++i) {
        const double var_x = mxx[i] - mx[i] * mx[i];
        const double var_y = myy[i] - my[i] * my[i];
        const double cov = mxy[i] - mx[i] * my[i];
        const double num = (2 * mx[i] * my[i] + kC1) * (2 * cov + kC2);
        const double den =
            (mx[i] * mx[i] + my[i] * my[i] + kC1) * (var_x + var_y + kC2);
        frame_sum += num / den;
      }
      total += frame_sum / double(plane);
    }
  }
  return total / (double(a.t()) * a.c());
}

}  // namespace vidaudit
