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

#ifndef PIXMIM_AUGMENT_HPP_
#define PIXMIM_AUGMENT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pixmim/image.hpp"
#include "pixmim/rng.hpp"

namespace pixmim {

class ForegroundMask;

enum class AugmentKind { kSrc, kRrc, kCc, kResize, kBg };

std::string_view to_string(AugmentKind kind);
/// Accepts "src", "rrc", "cc", "resize", "bg" (case-insensitive).
AugmentKind parse_augment_kind(std::string_view name);

/// How the crop window was chosen.
enum class CropPath {
  kDirect,           // first geometry that fit (or a deterministic kind)
  kCenterFallback,   // RRC ran out of attempts and took its center crop
  kBgAccepted,       // BG proposal with coverage under the threshold
  kBgFallback,       // BG exhausted its retries and used plain RRC
};

std::string_view to_string(CropPath path);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AugmentSpec {
  AugmentKind kind = AugmentKind::kSrc;
  int train_resolution = 224;
  Interval rrc_scale{0.2, 1.0};
  Interval rrc_aspect{3.0 / 4.0, 4.0 / 3.0};
  int src_pad = 4;
  double bg_threshold = 0.20;
  int bg_retries = 50;
  double horizontal_flip_prob = 0.5;
  ResizeOptions resize;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/**
 * One axis of a crop: the source extent is first resized to `frame`
 * (identity for RRC/BG/Resize), a window of `extent` pixels starting at
 * `offset` is cut from the frame, and the window is resized to `output`.
 * Offsets outside [0, frame - extent] reach into reflect padding.
 */
struct AxisGeometry {
  int source = 0;
  int frame = 0;
  int offset = 0;
  int extent = 0;
  int output = 0;

  /// Frame pixel holding the center of source pixel `s`.
  int frame_of_source(int s) const;
  /// Frame pixels (reflected into range, ascending, unique) whose centers
  /// fall under output samples [out_lo, out_hi).
  std::vector<int> frame_pixels(int out_lo, int out_hi) const;
  /// Pixels of the window that are real frame content rather than padding.
  int real_extent() const;

  friend bool operator==(const AxisGeometry&, const AxisGeometry&) = default;
};

struct CropGeometry {
  AxisGeometry rows;
  AxisGeometry cols;
  /// Horizontal flip applied after the final resize.
  bool flipped = false;

  friend bool operator==(const CropGeometry&, const CropGeometry&) = default;
};

/// The block of source pixels whose content reaches the output.
CropRect source_rect(const CropGeometry& geometry);

/// Geometry of an augmentation, sampled without touching pixels.
struct AugmentPlan {
  AugmentKind kind = AugmentKind::kSrc;
  CropGeometry geometry;
  CropPath path = CropPath::kDirect;
  /// Geometry proposals consumed (RRC attempts, or BG proposals).
  int attempts = 1;
  std::uint64_t seed = 0;
};

struct AugmentRecord {
  Image output;
  CropRect source_rect;
  CropGeometry geometry;
  bool flipped = false;
  std::uint64_t rng_seed_used = 0;
  AugmentKind kind = AugmentKind::kSrc;
  CropPath path = CropPath::kDirect;
  int attempts = 1;
};

/// (height, width) after resizing the shorter edge to `resolution`; the longer
/// edge is rounded half up.
std::pair<int, int> shorter_edge_size(int height, int width, int resolution);

struct RrcDraw {
  double scale;
  double aspect;
};

/// One (area scale, aspect) draw: scale uniform, aspect log-uniform.
RrcDraw draw_rrc_params(const AugmentSpec& spec, Rng& rng);

struct RrcCrop {
  CropRect rect;
  int attempts = 0;
  bool center_fallback = false;
};

/// Up to 10 attempts at a crop that fits; otherwise the aspect-clamped center crop.
RrcCrop sample_rrc_rect(int height, int width, const AugmentSpec& spec, Rng& rng);

AugmentPlan plan_src(int height, int width, const AugmentSpec& spec, std::uint64_t seed);
AugmentPlan plan_rrc(int height, int width, const AugmentSpec& spec, std::uint64_t seed);
AugmentPlan plan_cc(int height, int width, const AugmentSpec& spec);
AugmentPlan plan_resize(int height, int width, const AugmentSpec& spec);
AugmentPlan plan_bg(const ForegroundMask& fg, const AugmentSpec& spec, std::uint64_t seed);

/// Dispatches on spec.kind; `fg` is required for kBg and ignored otherwise.
AugmentPlan plan_augment(int height, int width, const AugmentSpec& spec, std::uint64_t seed,
                         const ForegroundMask* fg = nullptr);

/// Rasterizes a plan: frame resize, reflect-padded crop, output resize, flip.
AugmentRecord render(const Image& img, const AugmentPlan& plan, const AugmentSpec& spec);

AugmentRecord apply_src(const Image& img, const AugmentSpec& spec, std::uint64_t seed);
AugmentRecord apply_rrc(const Image& img, const AugmentSpec& spec, std::uint64_t seed);
AugmentRecord apply_cc(const Image& img, const AugmentSpec& spec);
AugmentRecord apply_resize(const Image& img, const AugmentSpec& spec);
AugmentRecord apply_bg(const Image& img, const ForegroundMask& fg, const AugmentSpec& spec,
                       std::uint64_t seed);

AugmentRecord apply_augment(const Image& img, const AugmentSpec& spec, std::uint64_t seed,
                            const ForegroundMask* fg = nullptr);

}  // namespace pixmim

#endif  // PIXMIM_AUGMENT_HPP_
