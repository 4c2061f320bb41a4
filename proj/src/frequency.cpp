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

#include "pixmim/frequency.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace pixmim {

namespace {

// FFTW planning is not thread-safe but executing an existing plan on new
// arrays is, so plans are created once under a lock and shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int height, int width, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(height, width, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan = fftw_plan_dft_2d(height, width, scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void fft_in_place(std::vector<Complex>& buffer, int height, int width, int sign) {
  fftw_plan plan = PlanCache::instance().get(height, width, sign);
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(plan, data, data);
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Raw (DC at 0) to centered layout.
void shift_into(const std::vector<Complex>& raw, std::span<Complex> centered, int h, int w) {
  const int uc = h / 2;
  const int vc = w / 2;
  for (int u = 0; u < h; ++u) {
    const int ru = wrap(u - uc, h);
    for (int v = 0; v < w; ++v) {
      centered[static_cast<std::size_t>(u) * w + v] =
          raw[static_cast<std::size_t>(ru) * w + wrap(v - vc, w)];
    }
  }
}

std::vector<Complex> unshift(std::span<const Complex> centered, int h, int w) {
  std::vector<Complex> raw(static_cast<std::size_t>(h) * w);
  const int uc = h / 2;
  const int vc = w / 2;
  for (int u = 0; u < h; ++u) {
    const int ru = wrap(u - uc, h);
    for (int v = 0; v < w; ++v) {
      raw[static_cast<std::size_t>(ru) * w + wrap(v - vc, w)] =
          centered[static_cast<std::size_t>(u) * w + v];
    }
  }
  return raw;
}

std::vector<Complex> twiddles(int n, double sign) {
  std::vector<Complex> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * k / n);
  return t;
}

// out[ru][rv] = sum_h sum_w in[h][w] * th[(ru*h) % H] * tw[(rv*w) % W]
std::vector<Complex> direct_sum(std::span<const Complex> in, int h, int w, double sign) {
  const auto th = twiddles(h, sign);
  const auto tw = twiddles(w, sign);
  std::vector<Complex> out(static_cast<std::size_t>(h) * w);
  for (int ru = 0; ru < h; ++ru) {
    for (int rv = 0; rv < w; ++rv) {
      Complex acc = 0.0;
      int hi = 0;
      for (int y = 0; y < h; ++y) {
        const Complex* row = in.data() + static_cast<std::size_t>(y) * w;
        Complex row_acc = 0.0;
        int wi = 0;
        for (int x = 0; x < w; ++x) {
          row_acc += row[x] * tw[wi];
          wi += rv;
          if (wi >= w) wi -= w;
        }
        acc += row_acc * th[hi];
        hi += ru;
        if (hi >= h) hi -= h;
      }
      out[static_cast<std::size_t>(ru) * w + rv] = acc;
    }
  }
  return out;
}

void check_bandwidth(int height, int width, double bandwidth) {
  const double limit = std::min(height / 2.0, width / 2.0);
  if (!(bandwidth >= 0.0 && bandwidth <= limit)) {
    throw std::invalid_argument("low-pass bandwidth " + std::to_string(bandwidth) +
                                " outside [0, " + std::to_string(limit) + "] for " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
}

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("band edges need at least two values");
  if (edges[0] != 0.0) throw std::invalid_argument("band edges must start at 0");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw std::invalid_argument("band edges must be strictly increasing");
    }
  }
}

std::vector<double> radius_table(const Spectrum& spec) {
  std::vector<double> r(spec.plane_size());
  for (int u = 0; u < spec.height(); ++u)
    for (int v = 0; v < spec.width(); ++v)
      r[static_cast<std::size_t>(u) * spec.width() + v] = spec.radius(u, v);
  return r;
}

// Component of `spec` restricted to radius in [lo, hi).
Image band_component(const Spectrum& spec, const std::vector<double>& radii, double lo,
                     double hi) {
  Spectrum band = spec;
  for (int c = 0; c < band.channels(); ++c) {
    auto plane = band.plane(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (radii[i] < lo || radii[i] >= hi) plane[i] = 0.0;
    }
  }
  return idft(band).image;
}

}  // namespace

Spectrum::Spectrum(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw std::invalid_argument("spectrum dimensions must be positive");
  }
  bins_.assign(plane_size() * static_cast<std::size_t>(channels), Complex(0.0, 0.0));
}

double Spectrum::radius(int u, int v) const {
  const double du = u - center_row();
  const double dv = v - center_col();
  return std::sqrt(du * du + dv * dv);
}

double Spectrum::max_radius() const { return max_bin_radius(height_, width_); }

double Spectrum::energy() const {
  double e = 0.0;
  for (const Complex& z : bins_) e += std::norm(z);
  return e;
}

double max_bin_radius(int height, int width) {
  // The farthest bin is the (0, 0) corner: offsets floor(H/2), floor(W/2).
  const double du = height / 2;
  const double dv = width / 2;
  return std::sqrt(du * du + dv * dv);
}

Spectrum dft(const Image& img) {
  check_finite(img, "dft");
  const int h = img.height();
  const int w = img.width();
  Spectrum spec(h, w, img.channels());
  std::vector<Complex> buffer(img.plane_size());
  for (int c = 0; c < img.channels(); ++c) {
    auto plane = img.plane(c);
    std::copy(plane.begin(), plane.end(), buffer.begin());
    fft_in_place(buffer, h, w, FFTW_FORWARD);
    shift_into(buffer, spec.plane(c), h, w);
  }
  return spec;
}

Spectrum naive_dft(const Image& img) {
  check_finite(img, "naive_dft");
  const int h = img.height();
  const int w = img.width();
  Spectrum spec(h, w, img.channels());
  std::vector<Complex> in(img.plane_size());
  for (int c = 0; c < img.channels(); ++c) {
    auto plane = img.plane(c);
    std::copy(plane.begin(), plane.end(), in.begin());
    shift_into(direct_sum(in, h, w, -1.0), spec.plane(c), h, w);
  }
  return spec;
}

namespace {

InverseResult finish_inverse(const std::vector<std::vector<Complex>>& planes, int h, int w) {
  InverseResult result{Image(h, w, static_cast<int>(planes.size())), 0.0};
  const double norm = 1.0 / (static_cast<double>(h) * w);
  for (std::size_t c = 0; c < planes.size(); ++c) {
    auto out = result.image.plane(static_cast<int>(c));
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = planes[c][i].real() * norm;
      result.max_imag_residue =
          std::max(result.max_imag_residue, std::abs(planes[c][i].imag() * norm));
    }
  }
  return result;
}

}  // namespace

InverseResult idft(const Spectrum& spec) {
  std::vector<std::vector<Complex>> planes;
  planes.reserve(static_cast<std::size_t>(spec.channels()));
  for (int c = 0; c < spec.channels(); ++c) {
    planes.push_back(unshift(spec.plane(c), spec.height(), spec.width()));
    fft_in_place(planes.back(), spec.height(), spec.width(), FFTW_BACKWARD);
  }
  return finish_inverse(planes, spec.height(), spec.width());
}

InverseResult naive_idft(const Spectrum& spec) {
  std::vector<std::vector<Complex>> planes;
  planes.reserve(static_cast<std::size_t>(spec.channels()));
  for (int c = 0; c < spec.channels(); ++c) {
    const auto raw = unshift(spec.plane(c), spec.height(), spec.width());
    planes.push_back(direct_sum(raw, spec.height(), spec.width(), 1.0));
  }
  return finish_inverse(planes, spec.height(), spec.width());
}

AmplitudePhase amplitude_phase(const Spectrum& spec) {
  AmplitudePhase out{spec.height(), spec.width(), spec.channels(), {}, {}};
  out.amplitude.reserve(spec.bins().size());
  out.phase.reserve(spec.bins().size());
  for (const Complex& z : spec.bins()) {
    const double amp = std::hypot(z.real(), z.imag());
    double phase = 0.0;
    if (amp != 0.0) {
      phase = std::atan2(z.imag(), z.real());
      if (phase <= -std::numbers::pi) phase = std::numbers::pi;
    }
    out.amplitude.push_back(amp);
    out.phase.push_back(phase);
  }
  return out;
}

FilterMask::FilterMask(int height, int width, double bandwidth)
    : height_(height), width_(width), bandwidth_(bandwidth) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("filter dimensions must be positive");
  check_bandwidth(height, width, bandwidth);
  pass_.resize(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
  const int uc = height / 2;
  const int vc = width / 2;
  for (int u = 0; u < height; ++u)
    for (int v = 0; v < width; ++v) {
      const double du = u - uc;
      const double dv = v - vc;
      pass_[static_cast<std::size_t>(u) * width + v] = std::sqrt(du * du + dv * dv) <= bandwidth;
    }
}

std::size_t FilterMask::passed_count() const {
  return static_cast<std::size_t>(std::count(pass_.begin(), pass_.end(), 1));
}

FilterMask ideal_lowpass(int height, int width, double bandwidth) {
  return FilterMask(height, width, bandwidth);
}

void apply_filter(Spectrum& spec, const FilterMask& mask) {
  if (spec.height() != mask.height() || spec.width() != mask.width()) {
    throw std::invalid_argument("filter mask does not match spectrum dimensions");
  }
  for (int c = 0; c < spec.channels(); ++c)
    for (int u = 0; u < spec.height(); ++u)
      for (int v = 0; v < spec.width(); ++v)
        if (!mask.passes(u, v)) spec.at(c, u, v) = 0.0;
}

Image low_freq_target(const Image& img, double bandwidth) {
  const FilterMask mask = ideal_lowpass(img.height(), img.width(), bandwidth);
  Spectrum spec = dft(img);
  apply_filter(spec, mask);
  return idft(spec).image;
}

Image low_freq_target_naive(const Image& img, double bandwidth) {
  const FilterMask mask = ideal_lowpass(img.height(), img.width(), bandwidth);
  Spectrum spec = naive_dft(img);
  apply_filter(spec, mask);
  return naive_idft(spec).image;
}

Image make_target(const Image& img, std::optional<double> bandwidth) {
  if (!bandwidth) return img;
  return low_freq_target(img, *bandwidth);
}

BandDecomposition band_decompose(const Image& img, std::span<const double> edges) {
  check_edges(edges);
  const Spectrum spec = dft(img);
  const auto radii = radius_table(spec);
  BandDecomposition out;
  out.edges.assign(edges.begin(), edges.end());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    out.components.push_back(band_component(spec, radii, edges[k], edges[k + 1]));
  }
  out.residual = band_component(spec, radii, edges.back(), HUGE_VAL);
  return out;
}

std::vector<double> default_band_edges(int height, int width, double band_width) {
  if (!(band_width > 0.0)) throw std::invalid_argument("band width must be positive");
  const double max_r = max_bin_radius(height, width);
  std::vector<double> edges{0.0};
  while (edges.back() <= max_r) edges.push_back(edges.back() + band_width);
  return edges;
}

double psnr_from_mse(double mse, double peak) { return 10.0 * std::log10(peak * peak / mse); }

BandProfile band_psnr(const Image& reference, const Image& candidate,
                      std::span<const double> edges, double zero_mse) {
  if (!reference.same_shape(candidate)) {
    throw std::invalid_argument("band_psnr: reference and candidate shapes differ");
  }
  check_edges(edges);
  const double max_r = max_bin_radius(reference.height(), reference.width());
  if (!(edges.back() > max_r)) {
    throw std::invalid_argument("band_psnr: last edge " + std::to_string(edges.back()) +
                                " does not cover the largest radius " + std::to_string(max_r));
  }
  const Spectrum ref_spec = dft(reference);
  const Spectrum cand_spec = dft(candidate);
  const auto radii = radius_table(ref_spec);

  BandProfile profile;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k];
    const double hi = edges[k + 1];
    const Image ref_band = band_component(ref_spec, radii, lo, hi);
    const Image cand_band = band_component(cand_spec, radii, lo, hi);
    double sq = 0.0;
    auto a = ref_band.data();
    auto b = cand_band.data();
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    BandPsnr band;
    band.lo = lo;
    band.hi = hi;
    band.mse = sq / static_cast<double>(a.size());
    band.infinite = band.mse <= zero_mse;
    band.psnr_db = band.infinite ? 0.0 : psnr_from_mse(band.mse);
    for (int c = 0; c < ref_spec.channels(); ++c) {
      auto plane = ref_spec.plane(c);
      for (std::size_t i = 0; i < plane.size(); ++i)
        if (radii[i] >= lo && radii[i] < hi) band.reference_energy += std::norm(plane[i]);
    }
    profile.bands.push_back(band);
  }
  return profile;
}

BandProfileAccumulator::BandProfileAccumulator(std::vector<double> edges)
    : edges_(std::move(edges)) {
  check_edges(edges_);
  sums_.assign(edges_.size() - 1, 0.0);
  finite_.assign(edges_.size() - 1, 0);
}

void BandProfileAccumulator::add(const BandProfile& profile) {
  if (profile.bands.size() != sums_.size()) {
    throw std::invalid_argument("band profile does not match accumulator edges");
  }
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    if (profile.bands[k].infinite) continue;
    sums_[k] += profile.bands[k].psnr_db;
    ++finite_[k];
  }
  ++count_;
}

std::vector<BandProfileAccumulator::Row> BandProfileAccumulator::rows() const {
  std::vector<Row> out;
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    out.push_back({edges_[k], edges_[k + 1], finite_[k],
                   finite_[k] ? sums_[k] / static_cast<double>(finite_[k]) : 0.0});
  }
  return out;
}

}  // namespace pixmim
