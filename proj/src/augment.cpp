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

#include "pixmim/augment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pixmim/coverage.hpp"

namespace pixmim {

namespace {

constexpr int kRrcAttempts = 10;

int reflect_index(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

AxisGeometry identity_axis(int source, int offset, int extent, int output) {
  return AxisGeometry{source, source, offset, extent, output};
}

bool draw_flip(const AugmentSpec& spec, Rng& rng) {
  return rng.uniform() < spec.horizontal_flip_prob;
}

void check_image(int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("augmentation needs a non-empty image");
  }
}

AugmentPlan rrc_plan_from(const RrcCrop& crop, int height, int width, const AugmentSpec& spec,
                          std::uint64_t seed, bool flipped) {
  AugmentPlan plan;
  plan.kind = AugmentKind::kRrc;
  plan.seed = seed;
  plan.attempts = crop.attempts;
  plan.path = crop.center_fallback ? CropPath::kCenterFallback : CropPath::kDirect;
  plan.geometry.rows =
      identity_axis(height, crop.rect.top, crop.rect.height, spec.train_resolution);
  plan.geometry.cols =
      identity_axis(width, crop.rect.left, crop.rect.width, spec.train_resolution);
  plan.geometry.flipped = flipped;
  return plan;
}

}  // namespace

std::string_view to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kSrc: return "src";
    case AugmentKind::kRrc: return "rrc";
    case AugmentKind::kCc: return "cc";
    case AugmentKind::kResize: return "resize";
    case AugmentKind::kBg: return "bg";
  }
  return "unknown";
}

AugmentKind parse_augment_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "src") return AugmentKind::kSrc;
  if (lower == "rrc") return AugmentKind::kRrc;
  if (lower == "cc") return AugmentKind::kCc;
  if (lower == "resize") return AugmentKind::kResize;
  if (lower == "bg") return AugmentKind::kBg;
  throw std::invalid_argument("unknown augmentation kind '" + std::string(name) +
                              "' (expected src, rrc, cc, resize or bg)");
}

std::string_view to_string(CropPath path) {
  switch (path) {
    case CropPath::kDirect: return "direct";
    case CropPath::kCenterFallback: return "center_fallback";
    case CropPath::kBgAccepted: return "bg_accepted";
    case CropPath::kBgFallback: return "bg_fallback";
  }
  return "unknown";
}

void AugmentSpec::validate() const {
  if (train_resolution < 1) throw std::invalid_argument("train_resolution must be positive");
  if (!(rrc_scale.lo > 0.0 && rrc_scale.lo <= rrc_scale.hi && rrc_scale.hi <= 1.0)) {
    throw std::invalid_argument("rrc_scale must be an interval inside (0, 1]");
  }
  if (!(rrc_aspect.lo > 0.0 && rrc_aspect.lo <= rrc_aspect.hi && std::isfinite(rrc_aspect.hi))) {
    throw std::invalid_argument("rrc_aspect must be a positive interval");
  }
  if (src_pad < 0 || src_pad >= train_resolution) {
    throw std::invalid_argument("src_pad must lie in [0, train_resolution)");
  }
  if (!(bg_threshold > 0.0 && bg_threshold < 1.0)) {
    throw std::invalid_argument("bg_threshold must lie in (0, 1)");
  }
  if (bg_retries < 1) throw std::invalid_argument("bg_retries must be at least 1");
  if (!(horizontal_flip_prob >= 0.0 && horizontal_flip_prob <= 1.0)) {
    throw std::invalid_argument("horizontal_flip_prob must lie in [0, 1]");
  }
}

int AxisGeometry::frame_of_source(int s) const {
  return static_cast<int>((2LL * s + 1) * frame / (2LL * source));
}

std::vector<int> AxisGeometry::frame_pixels(int out_lo, int out_hi) const {
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(frame), 0);
  const long long lo = 2LL * out_lo * extent;
  const long long hi = 2LL * out_hi * extent;
  for (int j = 0; j < extent; ++j) {
    const long long center = (2LL * j + 1) * output;
    if (center >= lo && center < hi) hit[static_cast<std::size_t>(reflect_index(offset + j, frame))] = 1;
  }
  std::vector<int> out;
  for (int f = 0; f < frame; ++f)
    if (hit[static_cast<std::size_t>(f)]) out.push_back(f);
  return out;
}

int AxisGeometry::real_extent() const {
  const int lo = std::max(offset, 0);
  const int hi = std::min(offset + extent, frame);
  return std::max(hi - lo, 0);
}

namespace {

std::pair<int, int> source_span(const AxisGeometry& axis) {
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(axis.frame), 0);
  for (int f : axis.frame_pixels(0, axis.output)) covered[static_cast<std::size_t>(f)] = 1;
  int first = -1;
  int last = -1;
  for (int s = 0; s < axis.source; ++s) {
    if (covered[static_cast<std::size_t>(axis.frame_of_source(s))]) {
      if (first < 0) first = s;
      last = s;
    }
  }
  if (first < 0) {
    // The window sits between source-pixel centers; take the nearest one.
    const int center = std::clamp(axis.offset + axis.extent / 2, 0, axis.frame - 1);
    first = last = std::min(
        static_cast<int>((2LL * center + 1) * axis.source / (2LL * axis.frame)), axis.source - 1);
  }
  return {first, last - first + 1};
}

}  // namespace

CropRect source_rect(const CropGeometry& geometry) {
  const auto [top, height] = source_span(geometry.rows);
  const auto [left, width] = source_span(geometry.cols);
  return CropRect{top, left, height, width};
}

std::pair<int, int> shorter_edge_size(int height, int width, int resolution) {
  check_image(height, width);
  const auto scaled = [resolution](int longer, int shorter) {
    return static_cast<int>((2LL * longer * resolution + shorter) / (2LL * shorter));
  };
  if (height <= width) return {resolution, scaled(width, height)};
  return {scaled(height, width), resolution};
}

RrcDraw draw_rrc_params(const AugmentSpec& spec, Rng& rng) {
  const double scale = rng.uniform(spec.rrc_scale.lo, spec.rrc_scale.hi);
  const double log_aspect = rng.uniform(std::log(spec.rrc_aspect.lo), std::log(spec.rrc_aspect.hi));
  return {scale, std::exp(log_aspect)};
}

RrcCrop sample_rrc_rect(int height, int width, const AugmentSpec& spec, Rng& rng) {
  check_image(height, width);
  const double area = static_cast<double>(height) * width;
  for (int attempt = 1; attempt <= kRrcAttempts; ++attempt) {
    const RrcDraw draw = draw_rrc_params(spec, rng);
    const double target = area * draw.scale;
    const int w = static_cast<int>(std::lround(std::sqrt(target * draw.aspect)));
    const int h = static_cast<int>(std::lround(std::sqrt(target / draw.aspect)));
    if (w > 0 && w <= width && h > 0 && h <= height) {
      const int top = static_cast<int>(rng.uniform_int(0, height - h));
      const int left = static_cast<int>(rng.uniform_int(0, width - w));
      return RrcCrop{{top, left, h, w}, attempt, false};
    }
  }
  const double in_ratio = static_cast<double>(width) / height;
  int w = width;
  int h = height;
  if (in_ratio < spec.rrc_aspect.lo) {
    h = static_cast<int>(std::lround(w / spec.rrc_aspect.lo));
  } else if (in_ratio > spec.rrc_aspect.hi) {
    w = static_cast<int>(std::lround(h * spec.rrc_aspect.hi));
  }
  h = std::clamp(h, 1, height);
  w = std::clamp(w, 1, width);
  return RrcCrop{{(height - h) / 2, (width - w) / 2, h, w}, kRrcAttempts, true};
}

AugmentPlan plan_src(int height, int width, const AugmentSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int res = spec.train_resolution;
  const int pad = spec.src_pad;
  const auto [fh, fw] = shorter_edge_size(height, width, res);
  Rng rng(seed);
  const int cy = static_cast<int>(rng.uniform_int(0, fh + 2 * pad - res));
  const int cx = static_cast<int>(rng.uniform_int(0, fw + 2 * pad - res));
  AugmentPlan plan;
  plan.kind = AugmentKind::kSrc;
  plan.seed = seed;
  plan.geometry.rows = AxisGeometry{height, fh, cy - pad, res, res};
  plan.geometry.cols = AxisGeometry{width, fw, cx - pad, res, res};
  plan.geometry.flipped = draw_flip(spec, rng);
  return plan;
}

AugmentPlan plan_rrc(int height, int width, const AugmentSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const RrcCrop crop = sample_rrc_rect(height, width, spec, rng);
  return rrc_plan_from(crop, height, width, spec, seed, draw_flip(spec, rng));
}

AugmentPlan plan_cc(int height, int width, const AugmentSpec& spec) {
  spec.validate();
  const int res = spec.train_resolution;
  const auto [fh, fw] = shorter_edge_size(height, width, res);
  AugmentPlan plan;
  plan.kind = AugmentKind::kCc;
  plan.geometry.rows = AxisGeometry{height, fh, (fh - res) / 2, res, res};
  plan.geometry.cols = AxisGeometry{width, fw, (fw - res) / 2, res, res};
  return plan;
}

AugmentPlan plan_resize(int height, int width, const AugmentSpec& spec) {
  spec.validate();
  check_image(height, width);
  AugmentPlan plan;
  plan.kind = AugmentKind::kResize;
  plan.geometry.rows = identity_axis(height, 0, height, spec.train_resolution);
  plan.geometry.cols = identity_axis(width, 0, width, spec.train_resolution);
  return plan;
}

AugmentPlan plan_bg(const ForegroundMask& fg, const AugmentSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int height = fg.height();
  const int width = fg.width();
  Rng rng(seed);
  for (int attempt = 1; attempt <= spec.bg_retries; ++attempt) {
    const RrcCrop crop = sample_rrc_rect(height, width, spec, rng);
    if (fg.fraction_in(crop.rect) < spec.bg_threshold) {
      AugmentPlan plan = rrc_plan_from(crop, height, width, spec, seed, draw_flip(spec, rng));
      plan.kind = AugmentKind::kBg;
      plan.path = CropPath::kBgAccepted;
      plan.attempts = attempt;
      return plan;
    }
  }
  const RrcCrop crop = sample_rrc_rect(height, width, spec, rng);
  AugmentPlan plan = rrc_plan_from(crop, height, width, spec, seed, draw_flip(spec, rng));
  plan.kind = AugmentKind::kBg;
  plan.path = CropPath::kBgFallback;
  plan.attempts = spec.bg_retries;
  return plan;
}

AugmentPlan plan_augment(int height, int width, const AugmentSpec& spec, std::uint64_t seed,
                         const ForegroundMask* fg) {
  switch (spec.kind) {
    case AugmentKind::kSrc: return plan_src(height, width, spec, seed);
    case AugmentKind::kRrc: return plan_rrc(height, width, spec, seed);
    case AugmentKind::kCc: return plan_cc(height, width, spec);
    case AugmentKind::kResize: return plan_resize(height, width, spec);
    case AugmentKind::kBg:
      if (fg == nullptr) throw std::invalid_argument("bg augmentation needs a foreground mask");
      if (fg->height() != height || fg->width() != width) {
        throw std::invalid_argument("foreground mask " + std::to_string(fg->height()) + "x" +
                                    std::to_string(fg->width()) + " does not match image " +
                                    std::to_string(height) + "x" + std::to_string(width));
      }
      return plan_bg(*fg, spec, seed);
  }
  throw std::invalid_argument("unknown augmentation kind");
}

AugmentRecord render(const Image& img, const AugmentPlan& plan, const AugmentSpec& spec) {
  const AxisGeometry& rows = plan.geometry.rows;
  const AxisGeometry& cols = plan.geometry.cols;
  if (rows.source != img.height() || cols.source != img.width()) {
    throw std::invalid_argument("augment plan was made for a different image size");
  }
  Image frame = (rows.frame != rows.source || cols.frame != cols.source)
                    ? resize(img, rows.frame, cols.frame, spec.resize)
                    : img;
  const int pad = std::max({0, -rows.offset, rows.offset + rows.extent - rows.frame, -cols.offset,
                            cols.offset + cols.extent - cols.frame});
  if (pad > 0) frame = reflect_pad(frame, pad);
  Image out = crop(frame, CropRect{rows.offset + pad, cols.offset + pad, rows.extent, cols.extent});
  out = resize(out, rows.output, cols.output, spec.resize);
  if (plan.geometry.flipped) out = flip_horizontal(out);

  AugmentRecord record;
  record.output = std::move(out);
  record.source_rect = source_rect(plan.geometry);
  record.geometry = plan.geometry;
  record.flipped = plan.geometry.flipped;
  record.rng_seed_used = plan.seed;
  record.kind = plan.kind;
  record.path = plan.path;
  record.attempts = plan.attempts;
  return record;
}

AugmentRecord apply_src(const Image& img, const AugmentSpec& spec, std::uint64_t seed) {
  return render(img, plan_src(img.height(), img.width(), spec, seed), spec);
}

AugmentRecord apply_rrc(const Image& img, const AugmentSpec& spec, std::uint64_t seed) {
  return render(img, plan_rrc(img.height(), img.width(), spec, seed), spec);
}

AugmentRecord apply_cc(const Image& img, const AugmentSpec& spec) {
  return render(img, plan_cc(img.height(), img.width(), spec), spec);
}

AugmentRecord apply_resize(const Image& img, const AugmentSpec& spec) {
  return render(img, plan_resize(img.height(), img.width(), spec), spec);
}

AugmentRecord apply_bg(const Image& img, const ForegroundMask& fg, const AugmentSpec& spec,
                       std::uint64_t seed) {
  AugmentSpec bg = spec;
  bg.kind = AugmentKind::kBg;
  return render(img, plan_augment(img.height(), img.width(), bg, seed, &fg), spec);
}

AugmentRecord apply_augment(const Image& img, const AugmentSpec& spec, std::uint64_t seed,
                            const ForegroundMask* fg) {
  return render(img, plan_augment(img.height(), img.width(), spec, seed, fg), spec);
}

}  // namespace pixmim
