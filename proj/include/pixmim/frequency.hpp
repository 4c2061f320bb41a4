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

#ifndef PIXMIM_FREQUENCY_HPP_
#define PIXMIM_FREQUENCY_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pixmim/image.hpp"

namespace pixmim {

using Complex = std::complex<double>;

/**
 * Per-channel 2D spectrum in centered layout: bin (u, v) holds frequency
 * (u - center_row, v - center_col), with the DC term at
 * (floor(H/2), floor(W/2)). Values are the unnormalized forward transform.
 */
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int height, int width, int channels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int center_row() const { return height_ / 2; }
  int center_col() const { return width_ / 2; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  Complex& at(int c, int u, int v) { return bins_[index(c, u, v)]; }
  const Complex& at(int c, int u, int v) const { return bins_[index(c, u, v)]; }

  std::span<Complex> plane(int c) {
    return {bins_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const Complex> plane(int c) const {
    return {bins_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const Complex> bins() const { return bins_; }

  /// Distance of bin (u, v) from the DC bin.
  double radius(int u, int v) const;
  /// Largest bin radius in this layout.
  double max_radius() const;

  /// Sum of squared amplitudes over all channels and bins.
  double energy() const;

 private:
  std::size_t index(int c, int u, int v) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(u)) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(v);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<Complex> bins_;
};

double max_bin_radius(int height, int width);

/// Forward 2D FFT of every channel, then shifted to centered layout.
Spectrum dft(const Image& img);

/// Direct evaluation of the DFT double sum; O((HW)^2). Reference path.
Spectrum naive_dft(const Image& img);

struct InverseResult {
  Image image;
  /// Largest |imaginary part| dropped when taking the real part.
  double max_imag_residue = 0.0;
};

/// Inverse 2D FFT with 1/(HW) normalization; keeps the real part.
InverseResult idft(const Spectrum& spec);

/// Direct evaluation of the inverse sum; O((HW)^2). Reference path.
InverseResult naive_idft(const Spectrum& spec);

struct AmplitudePhase {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> amplitude;
  /// atan2(imag, real) in (-pi, pi]; 0 where the amplitude is 0.
  std::vector<double> phase;
};

AmplitudePhase amplitude_phase(const Spectrum& spec);

/// Circular ideal low-pass mask over a centered spectrum: a bin passes iff
/// its distance from the DC bin is <= bandwidth.
class FilterMask {
 public:
  FilterMask(int height, int width, double bandwidth);

  int height() const { return height_; }
  int width() const { return width_; }
  double bandwidth() const { return bandwidth_; }
  bool passes(int u, int v) const {
    return pass_[static_cast<std::size_t>(u) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(v)] != 0;
  }
  std::size_t passed_count() const;

 private:
  int height_;
  int width_;
  double bandwidth_;
  std::vector<unsigned char> pass_;
};

/// Throws std::invalid_argument unless bandwidth lies in [0, min(h/2, w/2)].
FilterMask ideal_lowpass(int height, int width, double bandwidth);

/// Zeroes every bin the mask stops, in place.
void apply_filter(Spectrum& spec, const FilterMask& mask);

/// Per-channel ideal low-pass reconstruction target.
Image low_freq_target(const Image& img, double bandwidth);

/// Same pipeline through naive_dft / naive_idft; used for benchmarking.
Image low_freq_target_naive(const Image& img, double bandwidth);

/// Applies low_freq_target when a bandwidth is given; returns img unchanged otherwise.
Image make_target(const Image& img, std::optional<double> bandwidth);

struct BandDecomposition {
  std::vector<double> edges;
  /// components[k] carries the bins with radius in [edges[k], edges[k+1]).
  std::vector<Image> components;
  /// Everything at radius >= edges.back().
  Image residual;
};

/// Throws std::invalid_argument unless edges start at 0 and strictly increase.
BandDecomposition band_decompose(const Image& img, std::span<const double> edges);

/// Uniform edges of `width` bins from 0 past the largest radius of an h x w spectrum,
/// so every bin falls in some band.
std::vector<double> default_band_edges(int height, int width, double band_width = 8.0);

/// PSNR for one band. Infinite (zero-error) bands are tagged instead of holding inf.
struct BandPsnr {
  double lo = 0.0;
  double hi = 0.0;
  double mse = 0.0;
  bool infinite = false;
  double psnr_db = 0.0;
  /// Sum of squared reference amplitudes inside the band.
  double reference_energy = 0.0;
};

struct BandProfile {
  std::vector<BandPsnr> bands;
};

double psnr_from_mse(double mse, double peak = 1.0);

/// PSNR between band components of reference and candidate, peak value 1.0.
/// The last edge must exceed the largest bin radius.
/// Band MSE at or below this is round-off from the transforms, not signal,
/// and is reported as the infinite sentinel (about 200 dB at peak 1).
inline constexpr double kRoundoffMse = 1e-20;

BandProfile band_psnr(const Image& reference, const Image& candidate,
                      std::span<const double> edges, double zero_mse = kRoundoffMse);

/// Averages finite per-band PSNR across images.
class BandProfileAccumulator {
 public:
  explicit BandProfileAccumulator(std::vector<double> edges);

  void add(const BandProfile& profile);

  struct Row {
    double lo;
    double hi;
    std::size_t n_finite;
    /// Mean over finite samples; meaningless when n_finite == 0.
    double mean_psnr;
  };
  std::vector<Row> rows() const;
  std::size_t count() const { return count_; }

 private:
  std::vector<double> edges_;
  std::vector<double> sums_;
  std::vector<std::size_t> finite_;
  std::size_t count_ = 0;
};

}  // namespace pixmim

#endif  // PIXMIM_FREQUENCY_HPP_
