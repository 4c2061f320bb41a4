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

#include "pixmim/sample.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "pixmim/recon_loss.hpp"
#include "pixmim/rng.hpp"

namespace pixmim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json rect_json(const CropRect& r) {
  return {{"top", r.top}, {"left", r.left}, {"height", r.height}, {"width", r.width}};
}

json axis_json(const AxisGeometry& a) {
  return {{"source", a.source}, {"frame", a.frame}, {"offset", a.offset},
          {"extent", a.extent}, {"output", a.output}};
}

fs::path with_suffix(const fs::path& file, const std::string& suffix) {
  return fs::path(file.string() + suffix);
}

}  // namespace

std::uint64_t augment_seed(std::uint64_t sample_seed) { return derive_seed(sample_seed, 0); }
std::uint64_t mask_seed(std::uint64_t sample_seed) { return derive_seed(sample_seed, 1); }

SampleRecord make_sample(const PipelineConfig& config, const Image& img, std::uint64_t seed,
                         const ForegroundMask* fg, std::string id) {
  SampleRecord sample;
  sample.id = std::move(id);
  sample.augment = apply_augment(img, config.augment, augment_seed(seed), fg);
  const int res = config.augment.train_resolution;
  const PatchGrid grid = PatchGrid::for_image(res, res, config.patch_size);
  sample.mask = random_mask(grid, config.mask_ratio, mask_seed(seed));
  sample.visible = extract_visible(sample.augment.output, sample.mask);
  sample.targets = target_patches(sample.augment.output, config.bandwidth, grid);
  return sample;
}

std::vector<std::uint8_t> to_f32_bytes(std::span<const double> values) {
  std::vector<std::uint8_t> out(values.size() * sizeof(float));
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return out;
}

json augment_record_json(const AugmentRecord& record) {
  return {
      {"kind", std::string(to_string(record.kind))},
      {"path", std::string(to_string(record.path))},
      {"attempts", record.attempts},
      {"flipped", record.flipped},
      {"rng_seed_used", record.rng_seed_used},
      {"source_rect", rect_json(record.source_rect)},
      {"geometry", {{"rows", axis_json(record.geometry.rows)},
                    {"cols", axis_json(record.geometry.cols)}}},
      {"output_shape", {record.output.channels(), record.output.height(), record.output.width()}},
  };
}

void write_bytes(const fs::path& file, std::span<const std::uint8_t> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_json(const fs::path& file, const json& doc) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

void write_f32_tensor(const fs::path& file, std::span<const double> values,
                      const std::vector<std::size_t>& shape, const std::string& semantics,
                      const json& extra) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (n != values.size()) throw std::invalid_argument("tensor shape does not match its data");
  write_bytes(file, to_f32_bytes(values));
  json sidecar = extra;
  sidecar["file"] = file.filename().string();
  sidecar["dtype"] = "float32";
  sidecar["byte_order"] = "little";
  sidecar["layout"] = "row-major";
  sidecar["shape"] = shape;
  sidecar["semantics"] = semantics;
  write_json(with_suffix(file, ".json"), sidecar);
}

F32Tensor read_f32_tensor(const fs::path& file) {
  std::ifstream in(with_suffix(file, ".json"));
  if (!in) throw std::runtime_error("missing sidecar for " + file.string());
  const json sidecar = json::parse(in);
  if (sidecar.at("dtype") != "float32" || sidecar.at("byte_order") != "little") {
    throw std::runtime_error("unsupported tensor encoding in " + file.string());
  }
  F32Tensor tensor;
  tensor.shape = sidecar.at("shape").get<std::vector<std::size_t>>();
  std::size_t n = 1;
  for (auto d : tensor.shape) n *= d;
  const auto bytes = read_bytes(file);
  if (bytes.size() != n * 4) throw std::runtime_error("tensor size mismatch in " + file.string());
  tensor.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    tensor.values[i] = std::bit_cast<float>(bits);
  }
  return tensor;
}

void write_sample(const fs::path& dir, const SampleRecord& sample) {
  const std::string& id = sample.id;
  const auto& vis = sample.visible;
  write_f32_tensor(dir / (id + ".visible.f32"), vis.patches.values,
                   {vis.patches.count, vis.patches.dim},
                   "visible patches in ascending patch-index order; each row is "
                   "(patch row, patch col, channel) row-major",
                   {{"indices", vis.indices}});
  write_f32_tensor(dir / (id + ".target.f32"), sample.targets.values,
                   {sample.targets.count, sample.targets.dim},
                   "reconstruction target for every patch, row-major patch order; each row is "
                   "(patch row, patch col, channel) row-major");

  const auto mask_file = dir / (id + ".mask.bin");
  write_bytes(mask_file, serialize_mask(sample.mask));
  write_json(with_suffix(mask_file, ".json"),
             {{"file", mask_file.filename().string()},
              {"format", "PXMK"},
              {"version", 1},
              {"header_bytes", 36},
              {"header", "magic[4] u32 version, u32 rows, u32 cols, u32 patch_size, f64 ratio, "
                         "u64 seed; little-endian"},
              {"bits", "row-major patch flags, most significant bit first, 1 = masked"},
              {"rows", sample.mask.grid.rows},
              {"cols", sample.mask.grid.cols},
              {"patch_size", sample.mask.grid.patch_size},
              {"ratio", sample.mask.ratio},
              {"seed", sample.mask.seed},
              {"masked_count", sample.mask.masked_count()}});

  write_json(dir / (id + ".record.json"),
             {{"id", id},
              {"augment", augment_record_json(sample.augment)},
              {"visible_count", sample.mask.visible_count()},
              {"patch_count", sample.mask.grid.count()},
              {"files",
               {{"visible", id + ".visible.f32"},
                {"target", id + ".target.f32"},
                {"mask", id + ".mask.bin"}}}});
}

}  // namespace pixmim
