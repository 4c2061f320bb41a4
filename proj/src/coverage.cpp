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

#include "pixmim/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pixmim {

namespace {

void check_source(const ForegroundMask& fg, const CropGeometry& geometry) {
  if (geometry.rows.source != fg.height() || geometry.cols.source != fg.width()) {
    throw std::invalid_argument("foreground mask " + std::to_string(fg.height()) + "x" +
                                std::to_string(fg.width()) +
                                " does not match the augmented source image " +
                                std::to_string(geometry.rows.source) + "x" +
                                std::to_string(geometry.cols.source));
  }
}

// For every source index along one axis, the patch rows (or columns) whose
// footprint covers it.
std::vector<std::vector<int>> patches_per_source(const AxisGeometry& axis, int patch_size,
                                                 int patch_count, bool flipped) {
  std::vector<std::vector<int>> by_frame(static_cast<std::size_t>(axis.frame));
  for (int k = 0; k < patch_count; ++k) {
    int lo = k * patch_size;
    int hi = lo + patch_size;
    if (flipped) {
      lo = axis.output - (k + 1) * patch_size;
      hi = axis.output - k * patch_size;
    }
    for (int f : axis.frame_pixels(lo, hi)) by_frame[static_cast<std::size_t>(f)].push_back(k);
  }
  std::vector<std::vector<int>> by_source(static_cast<std::size_t>(axis.source));
  for (int s = 0; s < axis.source; ++s) {
    by_source[static_cast<std::size_t>(s)] =
        by_frame[static_cast<std::size_t>(axis.frame_of_source(s))];
  }
  return by_source;
}

}  // namespace

ForegroundMask::ForegroundMask(int height, int width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height < 1 || width < 1) throw std::invalid_argument("foreground mask must be non-empty");
  if (values_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw std::invalid_argument("foreground mask data does not match " + std::to_string(height) +
                                "x" + std::to_string(width));
  }
  for (auto& v : values_) v = v != 0 ? 1 : 0;
  const std::size_t stride = static_cast<std::size_t>(width) + 1;
  integral_.assign((static_cast<std::size_t>(height) + 1) * stride, 0);
  for (int y = 0; y < height; ++y) {
    long long row = 0;
    for (int x = 0; x < width; ++x) {
      row += values_[static_cast<std::size_t>(y) * width + x];
      integral_[(y + 1) * stride + (x + 1)] = integral_[y * stride + (x + 1)] + row;
    }
  }
}

long long ForegroundMask::count_in(const CropRect& rect) const {
  if (!rect.inside(height_, width_)) {
    throw std::invalid_argument("rect lies outside the foreground mask");
  }
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  const auto at = [&](int y, int x) { return integral_[y * stride + x]; };
  return at(rect.bottom(), rect.right()) - at(rect.top, rect.right()) -
         at(rect.bottom(), rect.left) + at(rect.top, rect.left);
}

double ForegroundMask::fraction_in(const CropRect& rect) const {
  const long long total = count();
  if (total == 0) return 0.0;
  return static_cast<double>(count_in(rect)) / static_cast<double>(total);
}

std::optional<double> CoverageCount::fraction() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(retained) / static_cast<double>(total);
}

CoverageCount count_crop(const ForegroundMask& fg, const CropGeometry& geometry) {
  check_source(fg, geometry);
  return CoverageCount{fg.count_in(source_rect(geometry)), fg.count()};
}

std::optional<double> coverage_of_crop(const ForegroundMask& fg, const CropGeometry& geometry) {
  return count_crop(fg, geometry).fraction();
}

std::optional<double> coverage_of_crop(const ForegroundMask& fg, const AugmentRecord& record) {
  return coverage_of_crop(fg, record.geometry);
}

MaskedCoverage::MaskedCoverage(const ForegroundMask& fg, const CropGeometry& geometry,
                               const PatchGrid& grid)
    : grid_(grid) {
  check_source(fg, geometry);
  if (grid.image_height() != geometry.rows.output || grid.image_width() != geometry.cols.output) {
    throw std::invalid_argument("mask grid does not tile the augmented output " +
                                std::to_string(geometry.rows.output) + "x" +
                                std::to_string(geometry.cols.output));
  }
  total_ = fg.count();
  single_.assign(static_cast<std::size_t>(grid.count()), 0);
  const auto row_patches = patches_per_source(geometry.rows, grid.patch_size, grid.rows, false);
  const auto col_patches =
      patches_per_source(geometry.cols, grid.patch_size, grid.cols, geometry.flipped);

  std::vector<int> key;
  for (int y = 0; y < fg.height(); ++y) {
    const auto& rows = row_patches[static_cast<std::size_t>(y)];
    if (rows.empty()) continue;
    for (int x = 0; x < fg.width(); ++x) {
      if (!fg.at(y, x)) continue;
      const auto& cols = col_patches[static_cast<std::size_t>(x)];
      if (cols.empty()) continue;
      if (rows.size() == 1 && cols.size() == 1) {
        ++single_[static_cast<std::size_t>(rows[0] * grid.cols + cols[0])];
        continue;
      }
      key.clear();
      for (int r : rows)
        for (int c : cols) key.push_back(r * grid.cols + c);
      std::sort(key.begin(), key.end());
      ++shared_[key];
    }
  }
}

CoverageCount MaskedCoverage::count(const MaskPattern& mask) const {
  if (!(mask.grid == grid_) || mask.visible.size() != static_cast<std::size_t>(grid_.count())) {
    throw std::invalid_argument("mask pattern grid does not match the coverage grid");
  }
  CoverageCount out{0, total_};
  for (std::size_t i = 0; i < single_.size(); ++i)
    if (mask.visible[i]) out.retained += single_[i];
  for (const auto& [patches, n] : shared_) {
    if (std::any_of(patches.begin(), patches.end(),
                    [&](int p) { return mask.is_visible(p); })) {
      out.retained += n;
    }
  }
  return out;
}

CoverageCount count_masked(const ForegroundMask& fg, const AugmentRecord& record,
                           const MaskPattern& mask) {
  return MaskedCoverage(fg, record.geometry, mask.grid).count(mask);
}

std::optional<double> coverage_of_masked(const ForegroundMask& fg, const AugmentRecord& record,
                                         const MaskPattern& mask) {
  return count_masked(fg, record, mask).fraction();
}

CoverageReport aggregate(std::span<const std::optional<double>> samples, std::string label) {
  CoverageReport report;
  report.label = std::move(label);
  for (const auto& s : samples) {
    if (s) {
      report.values.push_back(*s);
    } else {
      ++report.not_applicable;
    }
  }
  if (report.values.empty()) {
    throw std::invalid_argument("coverage aggregate" +
                                (report.label.empty() ? std::string() : " '" + report.label + "'") +
                                ": all " + std::to_string(samples.size()) +
                                " samples are not applicable (no foreground)");
  }
  report.count = report.values.size();
  double sum = 0.0;
  for (double v : report.values) sum += v;
  report.mean = sum / static_cast<double>(report.count);
  double sq = 0.0;
  for (double v : report.values) sq += (v - report.mean) * (v - report.mean);
  report.stddev = std::sqrt(sq / static_cast<double>(report.count));
  const auto [lo, hi] = std::minmax_element(report.values.begin(), report.values.end());
  report.min = *lo;
  report.max = *hi;
  // Rounding in the running sum can nudge the mean just past a bound.
  report.mean = std::clamp(report.mean, report.min, report.max);
  return report;
}

double pooled_coverage(std::span<const CoverageCount> counts) {
  long long retained = 0;
  long long total = 0;
  for (const auto& c : counts) {
    retained += c.retained;
    total += c.total;
  }
  if (total == 0) throw std::invalid_argument("pooled coverage: no image has foreground");
  return static_cast<double>(retained) / static_cast<double>(total);
}

}  // namespace pixmim
