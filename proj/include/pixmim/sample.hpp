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

#ifndef PIXMIM_SAMPLE_HPP_
#define PIXMIM_SAMPLE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pixmim/augment.hpp"
#include "pixmim/config.hpp"
#include "pixmim/coverage.hpp"
#include "pixmim/masking.hpp"

namespace pixmim {

/// One training example: encoder input, reconstruction target and provenance.
struct SampleRecord {
  std::string id;
  AugmentRecord augment;
  MaskPattern mask;
  VisiblePatches visible;
  /// Target patches for every grid position, row-major.
  Patches targets;
};

/// Seeds for the augmentation and the mask, both derived from one sample seed.
std::uint64_t augment_seed(std::uint64_t sample_seed);
std::uint64_t mask_seed(std::uint64_t sample_seed);

/// Runs augment -> mask -> target on one decoded image. The visible patches
/// and the target come from the same augmented view.
SampleRecord make_sample(const PipelineConfig& config, const Image& img, std::uint64_t seed,
                         const ForegroundMask* fg = nullptr, std::string id = {});

/// Little-endian float32 bytes of `values`.
std::vector<std::uint8_t> to_f32_bytes(std::span<const double> values);

nlohmann::json augment_record_json(const AugmentRecord& record);

/// Writes <id>.visible.f32, <id>.target.f32, <id>.mask.bin (each with a
/// .json sidecar) and <id>.record.json into `dir`.
void write_sample(const std::filesystem::path& dir, const SampleRecord& sample);

/// Writes a float32 tensor plus a <file>.json sidecar describing it.
void write_f32_tensor(const std::filesystem::path& file, std::span<const double> values,
                      const std::vector<std::size_t>& shape, const std::string& semantics,
                      const nlohmann::json& extra = nlohmann::json::object());

struct F32Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

/// Reads a tensor written by write_f32_tensor using only its sidecar.
F32Tensor read_f32_tensor(const std::filesystem::path& file);

void write_bytes(const std::filesystem::path& file, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& file);

/// Writes JSON with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& file, const nlohmann::json& doc);

}  // namespace pixmim

#endif  // PIXMIM_SAMPLE_HPP_
