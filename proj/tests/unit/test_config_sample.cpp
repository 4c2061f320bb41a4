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

#include <cstdlib>

#include "doctest.h"
#include "pixmim/config.hpp"
#include "pixmim/frequency.hpp"
#include "pixmim/sample.hpp"
#include "test_support.hpp"

using namespace pixmim;
using nlohmann::json;
using pixmim::testing::TempDir;
using pixmim::testing::random_image;

namespace fs = std::filesystem;

TEST_CASE("config defaults and round trip") {
  const PipelineConfig d = config_from_json(json::object());
  CHECK(d.augment.kind == AugmentKind::kSrc);
  CHECK(d.augment.train_resolution == 224);
  CHECK(d.mask_ratio == 0.75);
  CHECK(d.bandwidth == 40.0);
  CHECK(d.patch_size == 16);
  CHECK(d.loss.distance == Distance::kL2);
  CHECK(d.loss.normalize_per_patch);

  const json doc = json::parse(R"({
    "augment": {"kind": "rrc", "train_resolution": 96, "rrc_scale": [0.3, 0.9],
                "interpolation": "bicubic", "align_corners": true},
    "mask_ratio": 0.6, "bandwidth": 12.5, "patch_size": 8,
    "loss": {"distance": "l1", "normalize_per_patch": false, "eps": 1e-5},
    "seed": 42, "threads": 3, "preview_fill": 0.0
  })");
  const PipelineConfig c = config_from_json(doc);
  CHECK(c.augment.kind == AugmentKind::kRrc);
  CHECK(c.augment.rrc_scale.lo == 0.3);
  CHECK(c.augment.resize.mode == Interpolation::kBicubic);
  CHECK(c.augment.resize.align_corners);
  CHECK(c.loss.distance == Distance::kL1);
  CHECK(c.seed == 42);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("bandwidth null means pass-through") {
  const PipelineConfig c = config_from_json(json::parse(R"({"bandwidth": null})"));
  CHECK_FALSE(c.bandwidth.has_value());
  CHECK(config_to_json(c)["bandwidth"].is_null());
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"bandwidth": "low"})")), ConfigError);
}

TEST_CASE("config rejects bad input") {
  const char* bad[] = {
      R"({"mask_ratoi": 0.5})",
      R"({"augment": {"knd": "rrc"}})",
      R"({"loss": {"distance": "l2", "extra": 1}})",
      R"({"augment": {"kind": "zoom"}})",
      R"({"mask_ratio": 1.5})",
      R"({"mask_ratio": "half"})",
      R"({"patch_size": 15})",
      R"({"bandwidth": 113})",
      R"({"bandwidth": -1})",
      R"({"loss": {"eps": 0}})",
      R"({"loss": {"distance": "huber"}})",
      R"({"augment": {"interpolation": "nearest"}})",
      R"({"augment": {"rrc_scale": [0.5]}})",
      R"({"threads": -2})",
      R"([1, 2])",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(config_from_json(json::parse(text)), ConfigError);
  }
  CHECK_NOTHROW(config_from_json(json::parse(R"({"bandwidth": 112})")));
  CHECK_NOTHROW(config_from_json(json::parse(R"({"bandwidth": 0})")));
}

TEST_CASE("config paths resolve against the file") {
  TempDir tmp("cfg");
  const fs::path file = tmp.path() / "sub" / "cfg.json";
  fs::create_directories(file.parent_path());
  testing::write_file(file, R"({"input_dir": "imgs", "mask_dir": "../m", "output_dir": "/abs/out"})");
  const PipelineConfig c = load_config(file);
  CHECK(c.input_dir == (tmp.path() / "sub" / "imgs").lexically_normal());
  CHECK(c.mask_dir == (tmp.path() / "m").lexically_normal());
  CHECK(c.output_dir == fs::path("/abs/out"));

  testing::write_file(file, "{ not json");
  CHECK_THROWS_AS(load_config(file), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.path() / "missing.json"), ConfigError);
}

TEST_CASE("thread resolution") {
  unsetenv("PIXMIM_THREADS");
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
  setenv("PIXMIM_THREADS", "5", 1);
  CHECK(resolve_threads(3) == 5);
  setenv("PIXMIM_THREADS", "abc", 1);
  CHECK(resolve_threads(2) == 2);
  unsetenv("PIXMIM_THREADS");
}

TEST_CASE("make sample") {
  PipelineConfig c;
  const Image img = random_image(180, 240, 3, 1);
  const SampleRecord s = make_sample(c, img, 9, nullptr, "img");
  CHECK(s.id == "img");
  CHECK(s.mask.grid.rows == 14);
  CHECK(s.visible.patches.count == 49);
  CHECK(s.visible.patches.dim == 768);
  CHECK(s.targets.count == 196);
  CHECK(s.mask.seed == mask_seed(9));
  CHECK(s.augment.rng_seed_used == augment_seed(9));
  CHECK(augment_seed(9) != mask_seed(9));

  // Visible input and target come from the same augmented view.
  const PatchGrid grid{16, 14, 14};
  const VisiblePatches vis = extract_visible(s.augment.output, s.mask);
  CHECK(s.visible.indices == vis.indices);
  CHECK(s.visible.patches == vis.patches);
  CHECK(s.targets == patchify(low_freq_target(s.augment.output, 40.0), grid));

  const SampleRecord again = make_sample(c, img, 9, nullptr, "img");
  CHECK(again.targets == s.targets);
  CHECK(again.mask == s.mask);

  c.bandwidth.reset();
  c.mask_ratio = 0.0;
  const SampleRecord raw = make_sample(c, img, 9);
  CHECK(raw.targets == patchify(raw.augment.output, grid));
  CHECK(raw.visible.patches == raw.targets);
}

TEST_CASE("float32 tensors") {
  const std::vector<double> v{1.0, -2.5, 0.1, 3e38};
  const auto bytes = to_f32_bytes(v);
  REQUIRE(bytes.size() == 16);
  // 1.0f = 0x3f800000 little-endian.
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[3] == 0x3f);

  TempDir tmp("f32");
  write_f32_tensor(tmp.path() / "t.f32", v, {2, 2}, "test", {{"note", 1}});
  const F32Tensor t = read_f32_tensor(tmp.path() / "t.f32");
  CHECK(t.shape == std::vector<std::size_t>{2, 2});
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(t.values[i] == static_cast<float>(v[i]));
  const json side = json::parse(testing::read_file(tmp.path() / "t.f32.json"));
  CHECK(side["note"] == 1);
  CHECK(side["dtype"] == "float32");
  CHECK_THROWS_AS(write_f32_tensor(tmp.path() / "u.f32", v, {3}, "x"), std::invalid_argument);
}

TEST_CASE("write sample") {
  TempDir tmp("sample");
  PipelineConfig c;
  c.augment.train_resolution = 64;
  c.patch_size = 16;
  c.bandwidth = 8.0;
  const SampleRecord s = make_sample(c, random_image(70, 90, 3, 2), 3, nullptr, "x0");
  write_sample(tmp.path(), s);
  for (const char* f : {"x0.visible.f32", "x0.visible.f32.json", "x0.target.f32",
                        "x0.target.f32.json", "x0.mask.bin", "x0.mask.bin.json", "x0.record.json"})
    CHECK(fs::exists(tmp.path() / f));

  const F32Tensor vis = read_f32_tensor(tmp.path() / "x0.visible.f32");
  CHECK(vis.shape == std::vector<std::size_t>{4, 768});
  const F32Tensor tgt = read_f32_tensor(tmp.path() / "x0.target.f32");
  CHECK(tgt.shape == std::vector<std::size_t>{16, 768});
  for (std::size_t i = 0; i < tgt.values.size(); ++i)
    REQUIRE(tgt.values[i] == static_cast<float>(s.targets.values[i]));

  CHECK(deserialize_mask(read_bytes(tmp.path() / "x0.mask.bin")) == s.mask);
  const json vside = json::parse(testing::read_file(tmp.path() / "x0.visible.f32.json"));
  CHECK(vside["indices"].get<std::vector<int>>() == s.visible.indices);
  const json rec = json::parse(testing::read_file(tmp.path() / "x0.record.json"));
  CHECK(rec["visible_count"] == 4);
  CHECK(rec["augment"]["kind"] == "src");
}
