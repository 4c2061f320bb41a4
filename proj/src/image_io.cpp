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

#include "pixmim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace pixmim {

namespace fs = std::filesystem;

namespace {

cv::Mat read_raw(const fs::path& file) {
  if (sniff_format(file) == ImageFormat::kUnknown) {
    throw DecodeError(file.string() + ": not a PNG or JPEG file");
  }
  cv::Mat mat;
  try {
    mat = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DecodeError(file.string() + ": " + e.what());
  }
  if (mat.empty()) throw DecodeError(file.string() + ": could not decode image");
  return mat;
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

ImageFormat sniff_format(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  unsigned char sig[8] = {};
  if (!in.read(reinterpret_cast<char*>(sig), sizeof(sig))) return ImageFormat::kUnknown;
  static constexpr unsigned char kPng[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (std::equal(sig, sig + 8, kPng)) return ImageFormat::kPng;
  if (sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return ImageFormat::kJpeg;
  return ImageFormat::kUnknown;
}

ImageDims read_image_dims(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::vector<unsigned char> head(64 * 1024);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  const auto be16 = [&](std::size_t i) { return (head[i] << 8) | head[i + 1]; };
  const auto be32 = [&](std::size_t i) {
    return static_cast<int>((static_cast<std::uint32_t>(be16(i)) << 16) | be16(i + 2));
  };
  switch (sniff_format(file)) {
    case ImageFormat::kPng:
      if (head.size() >= 24) return ImageDims{be32(20), be32(16)};
      break;
    case ImageFormat::kJpeg: {
      std::size_t i = 2;
      while (i + 3 < head.size()) {
        if (head[i] != 0xFF) break;
        const unsigned char marker = head[i + 1];
        if (marker == 0xFF) {
          ++i;
          continue;
        }
        if (marker == 0xD8 || marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
          i += 2;
          continue;
        }
        const std::size_t length = static_cast<std::size_t>(be16(i + 2));
        const bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 &&
                         marker != 0xCC;
        if (sof && i + 9 <= head.size()) return ImageDims{be16(i + 5), be16(i + 7)};
        i += 2 + length;
      }
      break;
    }
    case ImageFormat::kUnknown:
      throw DecodeError(file.string() + ": not a PNG or JPEG file");
  }
  // Headers that do not fit the probe window: fall back to a full decode.
  const cv::Mat mat = read_raw(file);
  return ImageDims{mat.rows, mat.cols};
}

Image load_image(const fs::path& file) {
  cv::Mat mat = read_raw(file);
  const int src_channels = mat.channels();
  if (src_channels != 1 && src_channels != 3 && src_channels != 4) {
    throw DecodeError(file.string() + ": unsupported channel count " +
                      std::to_string(src_channels));
  }
  double full_scale = 0.0;
  switch (mat.depth()) {
    case CV_8U: full_scale = 255.0; break;
    case CV_16U: full_scale = 65535.0; break;
    default: throw DecodeError(file.string() + ": unsupported sample depth");
  }
  // Divide rather than multiply by the reciprocal so decoded files match
  // Image::from_interleaved_u8 bit for bit.
  cv::Mat converted;
  mat.convertTo(converted, CV_64F);
  const int channels = src_channels == 1 ? 1 : 3;
  Image img(converted.rows, converted.cols, channels);
  for (int y = 0; y < converted.rows; ++y) {
    const double* row = converted.ptr<double>(y);
    for (int x = 0; x < converted.cols; ++x) {
      const double* px = row + static_cast<std::size_t>(x) * src_channels;
      if (channels == 1) {
        img.at(0, y, x) = px[0] / full_scale;
      } else {
        // OpenCV decodes to BGR(A); planes are stored RGB.
        img.at(0, y, x) = px[2] / full_scale;
        img.at(1, y, x) = px[1] / full_scale;
        img.at(2, y, x) = px[0] / full_scale;
      }
    }
  }
  return img;
}

ForegroundMask load_foreground(const fs::path& file) {
  if (sniff_format(file) != ImageFormat::kPng) {
    throw DecodeError(file.string() + ": foreground masks must be PNG");
  }
  cv::Mat mat = read_raw(file);
  if (mat.channels() != 1) {
    throw DecodeError(file.string() + ": foreground masks must be single-channel");
  }
  std::vector<std::uint8_t> values(static_cast<std::size_t>(mat.rows) * mat.cols);
  for (int y = 0; y < mat.rows; ++y)
    for (int x = 0; x < mat.cols; ++x) {
      const bool fg = mat.depth() == CV_16U ? mat.at<std::uint16_t>(y, x) != 0
                                            : mat.at<std::uint8_t>(y, x) != 0;
      values[static_cast<std::size_t>(y) * mat.cols + x] = fg ? 1 : 0;
    }
  return ForegroundMask(mat.rows, mat.cols, std::move(values));
}

void save_png(const fs::path& file, const Image& img) {
  const int type = img.channels() == 1 ? CV_8UC1 : CV_8UC3;
  cv::Mat mat(img.height(), img.width(), type);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      if (img.channels() == 1) {
        row[x] = to_u8(img.at(0, y, x));
      } else {
        row[3 * x + 0] = to_u8(img.at(2, y, x));
        row[3 * x + 1] = to_u8(img.at(1, y, x));
        row[3 * x + 2] = to_u8(img.at(0, y, x));
      }
    }
  }
  if (!cv::imwrite(file.string(), mat)) {
    throw std::runtime_error("failed to write " + file.string());
  }
}

void save_mask_png(const fs::path& file, const ForegroundMask& fg) {
  cv::Mat mat(fg.height(), fg.width(), CV_8UC1);
  for (int y = 0; y < fg.height(); ++y)
    for (int x = 0; x < fg.width(); ++x) mat.at<std::uint8_t>(y, x) = fg.at(y, x) ? 255 : 0;
  if (!cv::imwrite(file.string(), mat)) {
    throw std::runtime_error("failed to write " + file.string());
  }
}

}  // namespace pixmim
