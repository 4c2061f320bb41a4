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


// Python bindings: numpy in, numpy out. Images are H x W x C (or H x W)
// arrays, float in [0, 1] or uint8.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstring>
#include <limits>
#include <optional>
#include <string>

#include "pixmim/config.hpp"
#include "pixmim/coverage.hpp"
#include "pixmim/frequency.hpp"
#include "pixmim/masking.hpp"
#include "pixmim/recon_loss.hpp"
#include "pixmim/rng.hpp"
#include "pixmim/sample.hpp"

namespace py = pybind11;
using namespace pixmim;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const py::array& arr) {
  if (arr.ndim() != 2 && arr.ndim() != 3) {
    throw std::invalid_argument("image must be a 2-D or 3-D array (H, W[, C])");
  }
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
  if (h < 1 || w < 1 || (c != 1 && c != 3)) {
    throw std::invalid_argument("image must be non-empty with 1 or 3 channels");
  }
  if (py::isinstance<py::array_t<std::uint8_t>>(arr)) {
    const auto u8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    return Image::from_interleaved_u8(h, w, c, {u8.data(), static_cast<std::size_t>(u8.size())});
  }
  const auto f = F64Array::ensure(arr);
  if (!f) throw std::invalid_argument("image must be numeric");
  Image img = Image::from_interleaved(h, w, c, {f.data(), static_cast<std::size_t>(f.size())});
  check_finite(img, "image");
  return img;
}

py::array_t<double> from_image(const Image& img) {
  const auto v = img.to_interleaved();
  py::array_t<double> out({img.height(), img.width(), img.channels()});
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<double> from_patches(const Patches& p) {
  py::array_t<double> out({p.count, p.dim});
  std::memcpy(out.mutable_data(), p.values.data(), p.values.size() * sizeof(double));
  return out;
}

Patches to_patches(const F64Array& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("patches must be a 2-D array (N, D)");
  Patches p(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
  std::memcpy(p.values.data(), arr.data(), p.values.size() * sizeof(double));
  return p;
}

ForegroundMask to_foreground(const py::array& arr) {
  const auto u8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!u8 || u8.ndim() != 2) throw std::invalid_argument("mask must be a 2-D array");
  return ForegroundMask(static_cast<int>(u8.shape(0)), static_cast<int>(u8.shape(1)),
                        std::vector<std::uint8_t>(u8.data(), u8.data() + u8.size()));
}

MaskPattern to_mask(const py::array& visible, int patch_size, double ratio) {
  const auto u8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(visible);
  if (!u8 || u8.ndim() != 2) throw std::invalid_argument("visible flags must be a 2-D array");
  MaskPattern m;
  m.grid = PatchGrid{patch_size, static_cast<int>(u8.shape(0)), static_cast<int>(u8.shape(1))};
  m.visible.assign(u8.data(), u8.data() + u8.size());
  m.ratio = ratio;
  return m;
}

py::array_t<std::uint8_t> visible_flags(const MaskPattern& m) {
  py::array_t<std::uint8_t> out({m.grid.rows, m.grid.cols});
  std::memcpy(out.mutable_data(), m.visible.data(), m.visible.size());
  return out;
}

py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

PipelineConfig parse_config(const std::string& text) {
  return config_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_pixmim, m) {
  m.doc() = "Native core of pixmim";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("low_freq_target",
        [](const py::array& img, double bandwidth) {
          Image in = to_image(img);
          Image out;
          {
            py::gil_scoped_release release;
            out = low_freq_target(in, bandwidth);
          }
          return from_image(out);
        },
        py::arg("image"), py::arg("bandwidth"),
        "Ideal low-pass filtered copy of the image (bins with radius <= bandwidth kept).");

  m.def("dft",
        [](const py::array& img) {
          const Image in = to_image(img);
          Spectrum s;
          {
            py::gil_scoped_release release;
            s = dft(in);
          }
          py::array_t<std::complex<double>> out({s.channels(), s.height(), s.width()});
          std::memcpy(out.mutable_data(), s.bins().data(), s.bins().size() * sizeof(Complex));
          return out;
        },
        py::arg("image"), "Centered unnormalized spectrum, shape (C, H, W), DC at (H//2, W//2).");

  m.def("band_psnr",
        [](const py::array& ref, const py::array& cand, std::vector<double> edges) {
          const Image a = to_image(ref);
          const Image b = to_image(cand);
          BandProfile p;
          {
            py::gil_scoped_release release;
            p = band_psnr(a, b, edges);
          }
          py::list rows;
          for (const auto& band : p.bands) {
            py::dict d;
            d["lo"] = band.lo;
            d["hi"] = band.hi;
            d["mse"] = band.mse;
            d["psnr"] = band.infinite ? std::numeric_limits<double>::infinity() : band.psnr_db;
            rows.append(d);
          }
          return rows;
        },
        py::arg("reference"), py::arg("candidate"), py::arg("edges"));

  m.def("default_band_edges", &default_band_edges, py::arg("height"), py::arg("width"),
        py::arg("band_width") = 8.0);

  m.def("random_mask",
        [](int rows, int cols, double ratio, std::uint64_t seed) {
          return visible_flags(random_mask(PatchGrid{1, rows, cols}, ratio, seed));
        },
        py::arg("rows"), py::arg("cols"), py::arg("ratio"), py::arg("seed"),
        "Visible flags (1 = visible) with exactly round(ratio * rows * cols) masked.");

  m.def("patchify",
        [](const py::array& img, int patch_size) {
          const Image in = to_image(img);
          return from_patches(patchify(in, PatchGrid::for_image(in.height(), in.width(), patch_size)));
        },
        py::arg("image"), py::arg("patch_size"));

  m.def("masked_loss",
        [](const F64Array& pred, const F64Array& target, const py::array& visible, int patch_size,
           const std::string& distance, bool normalize, double eps) {
          const Patches p = to_patches(pred);
          const Patches t = to_patches(target);
          const MaskPattern mask = to_mask(visible, patch_size, 0.0);
          const LossSpec spec{parse_distance(distance), normalize, eps};
          py::gil_scoped_release release;
          return masked_loss(p, t, mask, spec);
        },
        py::arg("pred"), py::arg("target"), py::arg("visible"), py::arg("patch_size"),
        py::arg("distance") = "l2", py::arg("normalize") = true, py::arg("eps") = 1e-6);

  m.def("coverage",
        [](const std::string& config_json, const py::array& fg_mask, std::uint64_t seed) {
          const PipelineConfig config = parse_config(config_json);
          const ForegroundMask fg = to_foreground(fg_mask);
          const int res = config.augment.train_resolution;
          const PatchGrid grid = PatchGrid::for_image(res, res, config.patch_size);
          CoverageCount crop, masked;
          {
            py::gil_scoped_release release;
            const AugmentPlan plan =
                plan_augment(fg.height(), fg.width(), config.augment, augment_seed(seed), &fg);
            crop = count_crop(fg, plan.geometry);
            masked = MaskedCoverage(fg, plan.geometry, grid)
                         .count(random_mask(grid, config.mask_ratio, mask_seed(seed)));
          }
          auto frac = [](const CoverageCount& c) -> py::object {
            const auto f = c.fraction();
            return f ? py::object(py::float_(*f)) : py::none();
          };
          return py::make_tuple(frac(crop), frac(masked));
        },
        py::arg("config_json"), py::arg("foreground"), py::arg("seed"),
        "(J, J under masking) for one sample seed; None when there is no foreground.");

  m.def("make_sample",
        [](const std::string& config_json, const py::array& image, std::uint64_t seed,
           const std::optional<py::array>& fg_mask) {
          const PipelineConfig config = parse_config(config_json);
          const Image img = to_image(image);
          std::optional<ForegroundMask> fg;
          if (fg_mask) fg = to_foreground(*fg_mask);
          SampleRecord s;
          {
            py::gil_scoped_release release;
            s = make_sample(config, img, seed, fg ? &*fg : nullptr);
          }
          py::dict out;
          out["augmented"] = from_image(s.augment.output);
          out["visible"] = from_patches(s.visible.patches);
          out["indices"] = py::array_t<int>(static_cast<py::ssize_t>(s.visible.indices.size()),
                                            s.visible.indices.data());
          out["targets"] = from_patches(s.targets);
          out["mask_visible"] = visible_flags(s.mask);
          const auto bits = pack_mask_bits(s.mask);
          out["mask_bits"] = py::bytes(reinterpret_cast<const char*>(bits.data()), bits.size());
          out["record"] = to_python(augment_record_json(s.augment));
          return out;
        },
        py::arg("config_json"), py::arg("image"), py::arg("seed"), py::arg("foreground") = py::none(),
        "Augment, mask and build targets for one image, as gen-targets does for that seed.");

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("index"));
}
