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

#ifndef PIXMIM_COVERAGE_HPP_
#define PIXMIM_COVERAGE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pixmim/augment.hpp"
#include "pixmim/image.hpp"
#include "pixmim/masking.hpp"

namespace pixmim {

/// Binary object mask at source resolution; nonzero input values are foreground.
class ForegroundMask {
 public:
  ForegroundMask() = default;
  ForegroundMask(int height, int width, std::vector<std::uint8_t> values);

  int height() const { return height_; }
  int width() const { return width_; }
  bool at(int y, int x) const {
    return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)] != 0;
  }
  /// Foreground pixel count over the whole mask.
  long long count() const { return count_in({0, 0, height_, width_}); }
  /// Foreground pixels inside `rect` (which must lie inside the mask).
  long long count_in(const CropRect& rect) const;

  /// Fraction of the foreground inside `rect`; 0 when there is no foreground.
  double fraction_in(const CropRect& rect) const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> values_;
  // (height + 1) x (width + 1) summed-area table.
  std::vector<long long> integral_;
};

/// Retained and original foreground pixel counts for one image.
struct CoverageCount {
  long long retained = 0;
  long long total = 0;

  /// retained / total, or nullopt (not applicable) when total is 0.
  std::optional<double> fraction() const;
};

CoverageCount count_crop(const ForegroundMask& fg, const CropGeometry& geometry);

/// Share of the foreground that survives into the crop; nullopt when the
/// mask has no foreground.
std::optional<double> coverage_of_crop(const ForegroundMask& fg, const CropGeometry& geometry);
std::optional<double> coverage_of_crop(const ForegroundMask& fg, const AugmentRecord& record);

/**
 * Foreground survival under crop-then-mask. Each source pixel is mapped to
 * the frame pixel holding its center, and each frame pixel to the output
 * patches whose footprint covers it (reflect padding and flips included).
 * Construction groups the foreground by covering-patch set once, so
 * evaluating many masks over one crop is cheap.
 */
class MaskedCoverage {
 public:
  MaskedCoverage(const ForegroundMask& fg, const CropGeometry& geometry, const PatchGrid& grid);

  CoverageCount count(const MaskPattern& mask) const;
  std::optional<double> evaluate(const MaskPattern& mask) const { return count(mask).fraction(); }

 private:
  PatchGrid grid_;
  long long total_ = 0;
  // Foreground pixels covered by exactly one patch, indexed by patch.
  std::vector<long long> single_;
  // Foreground pixels covered by several patches, keyed by the patch set.
  std::map<std::vector<int>, long long> shared_;
};

CoverageCount count_masked(const ForegroundMask& fg, const AugmentRecord& record,
                           const MaskPattern& mask);
std::optional<double> coverage_of_masked(const ForegroundMask& fg, const AugmentRecord& record,
                                         const MaskPattern& mask);

struct CoverageReport {
  std::string label;
  std::vector<double> values;
  std::size_t count = 0;
  std::size_t not_applicable = 0;
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Per-image mean. Not-applicable entries are dropped and counted; throws
/// std::invalid_argument if nothing is left.
CoverageReport aggregate(std::span<const std::optional<double>> samples, std::string label = {});

/// Pooled ratio sum(retained) / sum(total) over images with foreground.
/// Throws std::invalid_argument if no image has foreground.
double pooled_coverage(std::span<const CoverageCount> counts);

}  // namespace pixmim

#endif  // PIXMIM_COVERAGE_HPP_
