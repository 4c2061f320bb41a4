// Copyright 2026 The pixmim Authors. All rights reserved.
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

#include "pixmim/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pixmim {

namespace {

void check_dims(int height, int width, int channels) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("image dimensions must be positive, got " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("image must have 1 or 3 channels, got " +
                                std::to_string(channels));
  }
}

struct Tap {
  int index;
  double weight;
};

// Per-output-sample filter taps along one axis.
struct AxisTaps {
  int taps_per_sample = 0;
  std::vector<Tap> taps;
};

double cubic_weight(double x) {
  constexpr double a = -0.75;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

AxisTaps make_taps(int in, int out, const ResizeOptions& options) {
  AxisTaps axis;
  const bool cubic = options.mode == Interpolation::kBicubic;
  axis.taps_per_sample = cubic ? 4 : 2;
  axis.taps.reserve(static_cast<std::size_t>(out) * axis.taps_per_sample);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src;
    if (options.align_corners) {
      src = out > 1 ? o * static_cast<double>(in - 1) / (out - 1) : 0.0;
    } else {
      src = (o + 0.5) * scale - 0.5;
    }
    if (!cubic) {
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, in - 1);
      const double t = src - i0;
      axis.taps.push_back({i0, 1.0 - t});
      axis.taps.push_back({i1, t});
    } else {
      const int i0 = static_cast<int>(std::floor(src));
      const double t = src - i0;
      for (int k = -1; k <= 2; ++k) {
        const int idx = std::clamp(i0 + k, 0, in - 1);
        axis.taps.push_back({idx, cubic_weight(t - k)});
      }
    }
  }
  return axis;
}

int reflect_index(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

}  // namespace

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

Image::Image(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != plane_size() * static_cast<std::size_t>(channels)) {
    throw std::invalid_argument("image data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(height) + "x" +
                                std::to_string(width) + "x" + std::to_string(channels));
  }
}

Image Image::from_interleaved(int height, int width, int channels,
                              std::span<const double> interleaved) {
  Image img(height, width, channels);
  if (interleaved.size() != img.size()) {
    throw std::invalid_argument("interleaved buffer has " + std::to_string(interleaved.size()) +
                                " samples, expected " + std::to_string(img.size()));
  }
  std::size_t k = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) img.at(c, y, x) = interleaved[k++];
  return img;
}

Image Image::from_interleaved_u8(int height, int width, int channels,
                                 std::span<const unsigned char> interleaved) {
  Image img(height, width, channels);
  if (interleaved.size() != img.size()) {
    throw std::invalid_argument("interleaved buffer has " + std::to_string(interleaved.size()) +
                                " samples, expected " + std::to_string(img.size()));
  }
  std::size_t k = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) img.at(c, y, x) = interleaved[k++] / 255.0;
  return img;
}

std::vector<double> Image::to_interleaved() const {
  std::vector<double> out(size());
  std::size_t k = 0;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      for (int c = 0; c < channels_; ++c) out[k++] = at(c, y, x);
  return out;
}

PatchGrid PatchGrid::for_image(int height, int width, int patch_size) {
  if (patch_size <= 0) {
    throw std::invalid_argument("patch size must be positive");
  }
  if (height <= 0 || width <= 0 || height % patch_size != 0 || width % patch_size != 0) {
    throw std::invalid_argument("image " + std::to_string(height) + "x" + std::to_string(width) +
                                " is not divisible into " + std::to_string(patch_size) + "px patches");
  }
  return PatchGrid{patch_size, height / patch_size, width / patch_size};
}

Patches patchify(const Image& img, const PatchGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1 || grid.image_height() != img.height() ||
      grid.image_width() != img.width()) {
    throw std::invalid_argument("patch grid " + std::to_string(grid.rows) + "x" +
                                std::to_string(grid.cols) + " of " +
                                std::to_string(grid.patch_size) + "px does not tile image " +
                                std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  const int p = grid.patch_size;
  const int ch = img.channels();
  Patches out(static_cast<std::size_t>(grid.count()), static_cast<std::size_t>(p) * p * ch);
  for (int pr = 0; pr < grid.rows; ++pr) {
    for (int pc = 0; pc < grid.cols; ++pc) {
      auto vec = out.row(static_cast<std::size_t>(pr) * grid.cols + pc);
      std::size_t k = 0;
      for (int y = 0; y < p; ++y)
        for (int x = 0; x < p; ++x)
          for (int c = 0; c < ch; ++c) vec[k++] = img.at(c, pr * p + y, pc * p + x);
    }
  }
  return out;
}

Image unpatchify(const Patches& patches, const PatchGrid& grid, int channels) {
  const int p = grid.patch_size;
  if (grid.rows < 1 || grid.cols < 1 || p < 1) {
    throw std::invalid_argument("invalid patch grid");
  }
  if (patches.count != static_cast<std::size_t>(grid.count())) {
    throw std::invalid_argument("expected " + std::to_string(grid.count()) + " patches, got " +
                                std::to_string(patches.count));
  }
  const std::size_t dim = static_cast<std::size_t>(p) * p * channels;
  if (patches.dim != dim || patches.values.size() != patches.count * patches.dim) {
    throw std::invalid_argument("expected patch length " + std::to_string(dim) + ", got " +
                                std::to_string(patches.dim));
  }
  Image img(grid.image_height(), grid.image_width(), channels);
  for (int pr = 0; pr < grid.rows; ++pr) {
    for (int pc = 0; pc < grid.cols; ++pc) {
      auto vec = patches.row(static_cast<std::size_t>(pr) * grid.cols + pc);
      std::size_t k = 0;
      for (int y = 0; y < p; ++y)
        for (int x = 0; x < p; ++x)
          for (int c = 0; c < channels; ++c) img.at(c, pr * p + y, pc * p + x) = vec[k++];
    }
  }
  return img;
}

Image resize(const Image& img, int out_height, int out_width, ResizeOptions options) {
  if (out_height < 1 || out_width < 1) {
    throw std::invalid_argument("resize target must be at least 1x1, got " +
                                std::to_string(out_height) + "x" + std::to_string(out_width));
  }
  if (out_height == img.height() && out_width == img.width()) return img;

  const AxisTaps xt = make_taps(img.width(), out_width, options);
  const AxisTaps yt = make_taps(img.height(), out_height, options);
  Image out(out_height, out_width, img.channels());
  std::vector<double> tmp(static_cast<std::size_t>(img.height()) * out_width);

  for (int c = 0; c < img.channels(); ++c) {
    auto src = img.plane(c);
    for (int y = 0; y < img.height(); ++y) {
      const double* row = src.data() + static_cast<std::size_t>(y) * img.width();
      for (int x = 0; x < out_width; ++x) {
        double acc = 0.0;
        const Tap* t = &xt.taps[static_cast<std::size_t>(x) * xt.taps_per_sample];
        for (int k = 0; k < xt.taps_per_sample; ++k) acc += row[t[k].index] * t[k].weight;
        tmp[static_cast<std::size_t>(y) * out_width + x] = acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < out_height; ++y) {
      const Tap* t = &yt.taps[static_cast<std::size_t>(y) * yt.taps_per_sample];
      for (int x = 0; x < out_width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < yt.taps_per_sample; ++k)
          acc += tmp[static_cast<std::size_t>(t[k].index) * out_width + x] * t[k].weight;
        dst[static_cast<std::size_t>(y) * out_width + x] = acc;
      }
    }
  }
  return out;
}

Image reflect_pad(const Image& img, int pad) {
  if (pad < 0) throw std::invalid_argument("padding must be non-negative");
  if (pad >= std::min(img.height(), img.width())) {
    throw std::invalid_argument("reflect padding of " + std::to_string(pad) +
                                " needs both dimensions larger than the pad, got " +
                                std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  if (pad == 0) return img;
  Image out(img.height() + 2 * pad, img.width() + 2 * pad, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < out.height(); ++y) {
      const int sy = reflect_index(y - pad, img.height());
      for (int x = 0; x < out.width(); ++x)
        out.at(c, y, x) = img.at(c, sy, reflect_index(x - pad, img.width()));
    }
  return out;
}

Image crop(const Image& img, const CropRect& rect) {
  if (!rect.inside(img.height(), img.width())) {
    throw std::invalid_argument(
        "crop rect (top=" + std::to_string(rect.top) + ", left=" + std::to_string(rect.left) +
        ", " + std::to_string(rect.height) + "x" + std::to_string(rect.width) +
        ") is outside image " + std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  Image out(rect.height, rect.width, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < rect.height; ++y) {
      const double* src = &img.plane(c)[static_cast<std::size_t>(rect.top + y) * img.width() +
                                        static_cast<std::size_t>(rect.left)];
      std::copy(src, src + rect.width, &out.at(c, y, 0));
    }
  return out;
}

Image flip_horizontal(const Image& img) {
  Image out = img;
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(c, y, x) = img.at(c, y, img.width() - 1 - x);
  return out;
}

void check_finite(const Image& img, const char* what) {
  for (double v : img.data()) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": image contains non-finite values");
    }
  }
}

}  // namespace pixmim
