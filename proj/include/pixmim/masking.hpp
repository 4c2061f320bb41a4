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

#ifndef PIXMIM_MASKING_HPP_
#define PIXMIM_MASKING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pixmim/image.hpp"

namespace pixmim {

struct MaskPattern {
  PatchGrid grid;
  /// One flag per patch, row-major; 1 = visible to the encoder.
  std::vector<std::uint8_t> visible;
  double ratio = 0.0;
  std::uint64_t seed = 0;

  bool is_visible(int index) const { return visible[static_cast<std::size_t>(index)] != 0; }
  int visible_count() const;
  int masked_count() const { return grid.count() - visible_count(); }

  friend bool operator==(const MaskPattern&, const MaskPattern&) = default;
};

/// round(ratio * n) with ties going up.
int masked_patch_count(double ratio, int n);

/// Hides exactly masked_patch_count(ratio, N) patches chosen by a seeded shuffle.
MaskPattern random_mask(const PatchGrid& grid, double ratio, std::uint64_t seed);

/// Replaces the pixels of every masked patch with `fill`.
Image apply_mask(const Image& img, const MaskPattern& mask, double fill = 0.0);

struct VisiblePatches {
  Patches patches;
  /// Ascending patch indices of the rows in `patches`.
  std::vector<int> indices;
};

VisiblePatches extract_visible(const Image& img, const MaskPattern& mask);

/// Inverse of extract_visible: visible rows go back to their slots, masked slots get `fill`.
Image scatter_visible(const VisiblePatches& visible, const PatchGrid& grid, int channels,
                      double fill = 0.0);

/// Indices of masked patches, ascending.
std::vector<int> masked_indices(const MaskPattern& mask);

/// Bit-packed masked flags (1 = masked), row-major, most significant bit first.
std::vector<std::uint8_t> pack_mask_bits(const MaskPattern& mask);

/// Binary form: "PXMK" magic, u32 version, u32 rows, u32 cols, u32 patch_size,
/// f64 ratio, u64 seed, then pack_mask_bits(). All little-endian.
std::vector<std::uint8_t> serialize_mask(const MaskPattern& mask);
MaskPattern deserialize_mask(std::span<const std::uint8_t> bytes);

}  // namespace pixmim

#endif  // PIXMIM_MASKING_HPP_
