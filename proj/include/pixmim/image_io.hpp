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

#ifndef PIXMIM_IMAGE_IO_HPP_
#define PIXMIM_IMAGE_IO_HPP_

#include <filesystem>
#include <stdexcept>

#include "pixmim/coverage.hpp"
#include "pixmim/image.hpp"

namespace pixmim {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ImageFormat { kUnknown, kPng, kJpeg };

/// Sniffs the file signature; does not decode.
ImageFormat sniff_format(const std::filesystem::path& file);

struct ImageDims {
  int height = 0;
  int width = 0;
};

/// Reads dimensions from the PNG or JPEG header without decoding pixels.
/// Throws DecodeError.
ImageDims read_image_dims(const std::filesystem::path& file);

/// Decodes a PNG or JPEG into RGB (or grayscale) planes scaled to [0, 1].
/// Alpha is dropped. Throws DecodeError.
Image load_image(const std::filesystem::path& file);

/// Loads a single-channel PNG; nonzero pixels are foreground. Throws DecodeError.
ForegroundMask load_foreground(const std::filesystem::path& file);

/// Writes an 8-bit PNG, clamping to [0, 1] and rounding.
void save_png(const std::filesystem::path& file, const Image& img);

void save_mask_png(const std::filesystem::path& file, const ForegroundMask& fg);

}  // namespace pixmim

#endif  // PIXMIM_IMAGE_IO_HPP_
