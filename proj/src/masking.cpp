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

#include "pixmim/masking.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pixmim/rng.hpp"

namespace pixmim {

namespace {

constexpr std::uint32_t kMaskVersion = 1;
constexpr std::size_t kMaskHeaderBytes = 4 + 4 * 4 + 8 + 8;

void check_grid(const Image& img, const MaskPattern& mask) {
  if (mask.grid.image_height() != img.height() || mask.grid.image_width() != img.width()) {
    throw std::invalid_argument("mask grid " + std::to_string(mask.grid.rows) + "x" +
                                std::to_string(mask.grid.cols) + " does not tile image " +
                                std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  if (mask.visible.size() != static_cast<std::size_t>(mask.grid.count())) {
    throw std::invalid_argument("mask visibility length does not match its grid");
  }
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace

int MaskPattern::visible_count() const {
  return static_cast<int>(std::count(visible.begin(), visible.end(), std::uint8_t{1}));
}

int masked_patch_count(double ratio, int n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("mask ratio must lie in [0, 1], got " + std::to_string(ratio));
  }
  return static_cast<int>(std::floor(ratio * n + 0.5));
}

MaskPattern random_mask(const PatchGrid& grid, double ratio, std::uint64_t seed) {
  if (grid.rows < 1 || grid.cols < 1) throw std::invalid_argument("empty patch grid");
  const int n = grid.count();
  const int n_masked = masked_patch_count(ratio, n);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }

  MaskPattern mask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0), ratio, seed};
  for (int k = 0; k < n - n_masked; ++k) mask.visible[static_cast<std::size_t>(order[k])] = 1;
  return mask;
}

Image apply_mask(const Image& img, const MaskPattern& mask, double fill) {
  check_grid(img, mask);
  Image out = img;
  const int p = mask.grid.patch_size;
  for (int idx = 0; idx < mask.grid.count(); ++idx) {
    if (mask.is_visible(idx)) continue;
    const int top = (idx / mask.grid.cols) * p;
    const int left = (idx % mask.grid.cols) * p;
    for (int c = 0; c < img.channels(); ++c)
      for (int y = top; y < top + p; ++y)
        for (int x = left; x < left + p; ++x) out.at(c, y, x) = fill;
  }
  return out;
}

VisiblePatches extract_visible(const Image& img, const MaskPattern& mask) {
  check_grid(img, mask);
  const Patches all = patchify(img, mask.grid);
  VisiblePatches out;
  out.patches = Patches(static_cast<std::size_t>(mask.visible_count()), all.dim);
  std::size_t k = 0;
  for (int idx = 0; idx < mask.grid.count(); ++idx) {
    if (!mask.is_visible(idx)) continue;
    auto src = all.row(static_cast<std::size_t>(idx));
    std::copy(src.begin(), src.end(), out.patches.row(k++).begin());
    out.indices.push_back(idx);
  }
  return out;
}

Image scatter_visible(const VisiblePatches& visible, const PatchGrid& grid, int channels,
                      double fill) {
  const std::size_t dim = static_cast<std::size_t>(grid.patch_size) * grid.patch_size * channels;
  if (visible.patches.count != visible.indices.size() ||
      (visible.patches.count > 0 && visible.patches.dim != dim)) {
    throw std::invalid_argument("visible patches do not match their index list or grid");
  }
  Patches all(static_cast<std::size_t>(grid.count()), dim);
  std::fill(all.values.begin(), all.values.end(), fill);
  for (std::size_t k = 0; k < visible.indices.size(); ++k) {
    const int idx = visible.indices[k];
    if (idx < 0 || idx >= grid.count()) throw std::invalid_argument("patch index out of range");
    auto src = visible.patches.row(k);
    std::copy(src.begin(), src.end(), all.row(static_cast<std::size_t>(idx)).begin());
  }
  return unpatchify(all, grid, channels);
}

std::vector<int> masked_indices(const MaskPattern& mask) {
  std::vector<int> out;
  for (int idx = 0; idx < mask.grid.count(); ++idx)
    if (!mask.is_visible(idx)) out.push_back(idx);
  return out;
}

std::vector<std::uint8_t> pack_mask_bits(const MaskPattern& mask) {
  const std::size_t n = mask.visible.size();
  std::vector<std::uint8_t> bits((n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (!mask.visible[i]) bits[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bits;
}

std::vector<std::uint8_t> serialize_mask(const MaskPattern& mask) {
  std::vector<std::uint8_t> out{'P', 'X', 'M', 'K'};
  put_le<std::uint32_t>(out, kMaskVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mask.grid.rows));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mask.grid.cols));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mask.grid.patch_size));
  put_le<double>(out, mask.ratio);
  put_le<std::uint64_t>(out, mask.seed);
  const auto bits = pack_mask_bits(mask);
  out.insert(out.end(), bits.begin(), bits.end());
  return out;
}

MaskPattern deserialize_mask(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMaskHeaderBytes || std::memcmp(bytes.data(), "PXMK", 4) != 0) {
    throw std::invalid_argument("not a serialized mask pattern");
  }
  if (get_le<std::uint32_t>(bytes, 4) != kMaskVersion) {
    throw std::invalid_argument("unsupported mask pattern version");
  }
  MaskPattern mask;
  mask.grid.rows = static_cast<int>(get_le<std::uint32_t>(bytes, 8));
  mask.grid.cols = static_cast<int>(get_le<std::uint32_t>(bytes, 12));
  mask.grid.patch_size = static_cast<int>(get_le<std::uint32_t>(bytes, 16));
  mask.ratio = get_le<double>(bytes, 20);
  mask.seed = get_le<std::uint64_t>(bytes, 28);
  const std::size_t n = static_cast<std::size_t>(mask.grid.count());
  if (bytes.size() != kMaskHeaderBytes + (n + 7) / 8) {
    throw std::invalid_argument("serialized mask length does not match its header");
  }
  mask.visible.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool masked = bytes[kMaskHeaderBytes + i / 8] & (0x80u >> (i % 8));
    mask.visible[i] = masked ? 0 : 1;
  }
  return mask;
}

}  // namespace pixmim
