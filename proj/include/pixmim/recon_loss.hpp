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

#ifndef PIXMIM_RECON_LOSS_HPP_
#define PIXMIM_RECON_LOSS_HPP_

#include <optional>
#include <span>
#include <string_view>

#include "pixmim/image.hpp"
#include "pixmim/masking.hpp"

namespace pixmim {

enum class Distance { kL1, kL2 };

std::string_view to_string(Distance distance);
Distance parse_distance(std::string_view name);

struct LossSpec {
  Distance distance = Distance::kL2;
  /// Standardize each target patch: (t - mean) / (std + eps), population std.
  bool normalize_per_patch = true;
  double eps = 1e-6;
};

/// Standardizes one patch in place.
void normalize_patch(std::span<double> patch, double eps);

/**
 * Mean over masked patches of the mean per-element distance between the
 * prediction and the (optionally standardized) target patch. `pred` holds a
 * prediction for every patch of the grid; rows at visible positions are
 * never read.
 */
double masked_loss(const Patches& pred, const Patches& target, const MaskPattern& mask,
                   const LossSpec& spec = {});
double masked_loss(const Patches& pred, const Image& target, const MaskPattern& mask,
                   const LossSpec& spec = {});

/// Patches of the low-pass target; with no bandwidth, of the image itself.
Patches target_patches(const Image& img, std::optional<double> bandwidth, const PatchGrid& grid);

}  // namespace pixmim

#endif  // PIXMIM_RECON_LOSS_HPP_
