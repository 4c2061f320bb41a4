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

#include "pixmim/recon_loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixmim/frequency.hpp"

namespace pixmim {

std::string_view to_string(Distance distance) {
  return distance == Distance::kL1 ? "l1" : "l2";
}

Distance parse_distance(std::string_view name) {
  if (name == "l1" || name == "L1") return Distance::kL1;
  if (name == "l2" || name == "L2") return Distance::kL2;
  throw std::invalid_argument("unknown distance '" + std::string(name) + "' (expected l1 or l2)");
}

void normalize_patch(std::span<double> patch, double eps) {
  if (patch.empty()) return;
  const double n = static_cast<double>(patch.size());
  double mean = 0.0;
  for (double v : patch) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : patch) var += (v - mean) * (v - mean);
  const double denom = std::sqrt(var / n) + eps;
  for (double& v : patch) v = (v - mean) / denom;
}

double masked_loss(const Patches& pred, const Patches& target, const MaskPattern& mask,
                   const LossSpec& spec) {
  const auto n = static_cast<std::size_t>(mask.grid.count());
  if (mask.visible.size() != n) throw std::invalid_argument("mask does not match its grid");
  if (target.count != n) {
    throw std::invalid_argument("target has " + std::to_string(target.count) +
                                " patches, mask grid has " + std::to_string(n));
  }
  if (pred.count != n || pred.dim != target.dim) {
    throw std::invalid_argument("prediction shape " + std::to_string(pred.count) + "x" +
                                std::to_string(pred.dim) + " does not match target " +
                                std::to_string(target.count) + "x" + std::to_string(target.dim));
  }
  if (mask.masked_count() == 0) {
    throw std::invalid_argument("masked_loss needs at least one masked patch");
  }
  std::vector<double> t(target.dim);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.visible[i]) continue;
    auto src = target.row(i);
    t.assign(src.begin(), src.end());
    if (spec.normalize_per_patch) normalize_patch(t, spec.eps);
    auto p = pred.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double d = p[k] - t[k];
      acc += spec.distance == Distance::kL2 ? d * d : std::abs(d);
    }
    total += acc / static_cast<double>(t.size());
  }
  return total / static_cast<double>(mask.masked_count());
}

double masked_loss(const Patches& pred, const Image& target, const MaskPattern& mask,
                   const LossSpec& spec) {
  return masked_loss(pred, patchify(target, mask.grid), mask, spec);
}

Patches target_patches(const Image& img, std::optional<double> bandwidth, const PatchGrid& grid) {
  if (grid.image_height() != img.height() || grid.image_width() != img.width()) {
    throw std::invalid_argument("patch grid does not tile the target image");
  }
  return patchify(make_target(img, bandwidth), grid);
}

}  // namespace pixmim
