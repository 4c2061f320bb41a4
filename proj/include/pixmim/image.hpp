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

#ifndef PIXMIM_IMAGE_HPP_
#define PIXMIM_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace pixmim {

/**
 * Planar floating-point image: `channels` separate height x width planes,
 * each stored row-major. Values live in [0, 1] after ingestion but no op
 * here clamps, so low-pass targets may overshoot slightly.
 */
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);
  Image(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> plane(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  /// Builds a planar image from height x width x channels interleaved samples.
  static Image from_interleaved(int height, int width, int channels,
                                std::span<const double> interleaved);
  /// Builds a planar image from 8-bit interleaved samples, scaled by 1/255.
  static Image from_interleaved_u8(int height, int width, int channels,
                                   std::span<const unsigned char> interleaved);
  std::vector<double> to_interleaved() const;

  friend bool operator==(const Image& a, const Image& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Non-overlapping square patch layout over an image of rows*patch x cols*patch.
struct PatchGrid {
  int patch_size = 16;
  int rows = 0;
  int cols = 0;

  /// Throws std::invalid_argument unless patch_size divides both dimensions.
  static PatchGrid for_image(int height, int width, int patch_size);

  int count() const { return rows * cols; }
  int image_height() const { return rows * patch_size; }
  int image_width() const { return cols * patch_size; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

struct CropRect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  int bottom() const { return top + height; }
  int right() const { return left + width; }
  bool inside(int image_height, int image_width) const {
    return height > 0 && width > 0 && top >= 0 && left >= 0 && bottom() <= image_height &&
           right() <= image_width;
  }
  long long area() const { return static_cast<long long>(height) * width; }

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// A row-major matrix of patch vectors: `count` rows of `dim` values.
/// Inside a patch, values are ordered (patch row, patch col, channel).
struct Patches {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  Patches() = default;
  Patches(std::size_t count_, std::size_t dim_)
      : count(count_), dim(dim_), values(count_ * dim_, 0.0) {}

  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

  friend bool operator==(const Patches&, const Patches&) = default;
};

enum class Interpolation { kBilinear, kBicubic };

struct ResizeOptions {
  Interpolation mode = Interpolation::kBilinear;
  /// Half-pixel sampling (false) or corner-aligned sampling (true).
  bool align_corners = false;
};

Patches patchify(const Image& img, const PatchGrid& grid);
Image unpatchify(const Patches& patches, const PatchGrid& grid, int channels);

Image resize(const Image& img, int out_height, int out_width, ResizeOptions options = {});

/// Mirror padding that does not repeat the edge pixel: [a,b,c] pad 1 -> [b,a,b,c,b].
Image reflect_pad(const Image& img, int pad);

Image crop(const Image& img, const CropRect& rect);

Image flip_horizontal(const Image& img);

/// Throws std::invalid_argument if any sample is NaN or infinite.
void check_finite(const Image& img, const char* what);

}  // namespace pixmim

#endif  // PIXMIM_IMAGE_HPP_
