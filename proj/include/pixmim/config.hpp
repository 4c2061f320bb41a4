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

#ifndef PIXMIM_CONFIG_HPP_
#define PIXMIM_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "pixmim/augment.hpp"
#include "pixmim/recon_loss.hpp"

namespace pixmim {

/// Raised for malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  AugmentSpec augment;
  double mask_ratio = 0.75;
  /// Low-pass bandwidth in bins; nullopt passes raw pixels through.
  std::optional<double> bandwidth = 40.0;
  int patch_size = 16;
  LossSpec loss;
  std::uint64_t seed = 0;
  std::filesystem::path input_dir;
  std::optional<std::filesystem::path> mask_dir;
  std::filesystem::path output_dir;
  /// Worker count; 0 picks the hardware concurrency. PIXMIM_THREADS overrides.
  int threads = 0;
  /// Mask fill value used by previews.
  double preview_fill = 0.5;

  /// Throws ConfigError.
  void validate() const;
};

/**
 * Parses the JSON form. Unknown keys anywhere are rejected. Relative paths
 * resolve against `base_dir`. Missing keys keep their defaults; "bandwidth"
 * may be null for pass-through targets.
 */
PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const PipelineConfig& config);

/// Reads and validates a config file; paths resolve against its directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// Worker count after applying PIXMIM_THREADS and the hardware default.
int resolve_threads(int configured);

}  // namespace pixmim

#endif  // PIXMIM_CONFIG_HPP_
