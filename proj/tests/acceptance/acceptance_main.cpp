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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pixmim/augment.hpp"
#include "pixmim/commands.hpp"
#include "pixmim/coverage.hpp"
#include "pixmim/frequency.hpp"
#include "pixmim/image_io.hpp"
#include "pixmim/masking.hpp"
#include "pixmim/recon_loss.hpp"
#include "pixmim/rng.hpp"
#include "test_support.hpp"

namespace {

using namespace pixmim;
using pixmim::testing::max_abs_diff;
using pixmim::testing::random_image;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Relative out-of-band energy, in-band mismatch and idempotence of the target.
struct SupportStats {
  double out_of_band = 0.0;
  double in_band = 0.0;
  double idempotence = 0.0;
};

SupportStats support_stats(const Image& img, double r) {
  SupportStats s;
  const Image target = low_freq_target(img, r);
  const Spectrum src = dft(img);
  const Spectrum tgt = dft(target);
  double out_energy = 0.0;
  for (int c = 0; c < img.channels(); ++c)
    for (int u = 0; u < img.height(); ++u)
      for (int v = 0; v < img.width(); ++v) {
        if (testing::oracle_radius(img.height(), img.width(), u, v) <= r) {
          s.in_band = std::max(s.in_band, std::abs(tgt.at(c, u, v) - src.at(c, u, v)));
        } else {
          out_energy += std::norm(tgt.at(c, u, v));
        }
      }
  s.out_of_band = out_energy / src.energy();
  s.idempotence = max_abs_diff(low_freq_target(target, r), target);
  return s;
}

Outcome dft_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Image img = random_image(16, 16, 1, 1000 + i);
    const Spectrum fast = dft(img);
    const auto oracle = testing::oracle_dft_plane(img, 0);
    for (std::size_t k = 0; k < oracle.size(); ++k)
      worst = std::max(worst, std::abs(fast.plane(0)[k] - oracle[k]));
  }
  const Image big = random_image(224, 224, 3, 77);
  const double round_trip = max_abs_diff(idft(dft(big)).image, big);
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && round_trip < 1e-6 && secs < 30.0,
          "max |fft - direct sum| = " + fmt("%.3g", worst) + " over 100 16x16 images, " +
              "224x224 round trip " + fmt("%.3g", round_trip) + ", " + fmt("%.2f s", secs)};
}

Outcome spectral_support() {
  const auto t0 = Clock::now();
  SupportStats worst;
  for (int i = 0; i < 1000; ++i) {
    const SupportStats s = support_stats(random_image(224, 224, 3, 5000 + i), 40.0);
    worst.out_of_band = std::max(worst.out_of_band, s.out_of_band);
    worst.in_band = std::max(worst.in_band, s.in_band);
    worst.idempotence = std::max(worst.idempotence, s.idempotence);
  }
  const double secs = seconds_since(t0);
  return {worst.out_of_band <= 1e-9 && worst.in_band <= 1e-6 && worst.idempotence <= 1e-6 &&
              secs < 120.0,
          "1000 images r=40: out-of-band " + fmt("%.3g", worst.out_of_band) + ", in-band " +
              fmt("%.3g", worst.in_band) + ", idempotence " + fmt("%.3g", worst.idempotence) +
              ", " + fmt("%.1f s", secs)};
}

Outcome parseval_linearity() {
  double parseval = 0.0;
  double linearity = 0.0;
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const int h = dim(gen);
    const int w = dim(gen);
    const int c = i % 2 == 0 ? 1 : 3;
    const Image x = random_image(h, w, c, 200 + i);
    const Image y = random_image(h, w, c, 900 + i);
    double pixel_sq = 0.0;
    for (double v : x.data()) pixel_sq += v * v;
    const Spectrum fx = dft(x);
    parseval = std::max(parseval, std::abs(pixel_sq * h * w - fx.energy()) / fx.energy());

    const double a = coef(gen);
    const double b = coef(gen);
    Image mix(h, w, c);
    for (std::size_t k = 0; k < mix.size(); ++k) mix.data()[k] = a * x.data()[k] + b * y.data()[k];
    const Spectrum fm = dft(mix);
    const Spectrum fy = dft(y);
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < fm.bins().size(); ++k) {
      err = std::max(err, std::abs(fm.bins()[k] - (a * fx.bins()[k] + b * fy.bins()[k])));
      scale = std::max(scale, std::abs(fm.bins()[k]));
    }
    linearity = std::max(linearity, err / scale);
  }
  return {parseval <= 1e-9 && linearity <= 1e-9,
          "100 images: Parseval rel " + fmt("%.3g", parseval) + ", linearity rel " +
              fmt("%.3g", linearity)};
}

Outcome masking_counts() {
  const PatchGrid grid{16, 14, 14};
  std::vector<int> masked_hits(196, 0);
  bool exact = true;
  constexpr int kSeeds = 10000;
  for (int s = 0; s < kSeeds; ++s) {
    const MaskPattern m = random_mask(grid, 0.75, derive_seed(31337, s));
    exact = exact && m.visible_count() == 49;
    for (int p = 0; p < 196; ++p) masked_hits[p] += m.is_visible(p) ? 0 : 1;
  }
  double lo = 1.0;
  double hi = 0.0;
  for (int n : masked_hits) {
    lo = std::min(lo, n / static_cast<double>(kSeeds));
    hi = std::max(hi, n / static_cast<double>(kSeeds));
  }
  // Spread of the counts against Binomial(10^4, 0.75), reported for context.
  const double sd = std::sqrt(kSeeds * 0.75 * 0.25);
  double chi2 = 0.0;
  double max_z = 0.0;
  for (int n : masked_hits) {
    const double z = (n - kSeeds * 0.75) / sd;
    chi2 += z * z;
    max_z = std::max(max_z, std::abs(z));
  }
  return {exact && lo >= 0.74 && hi <= 0.76,
          std::string(exact ? "49 visible for all 10^4 seeds" : "visible count varied") +
              ", per-patch mask frequency in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) +
              "], max |z| " + fmt("%.2f", max_z) + ", chi2 " + fmt("%.1f", chi2) +
              " on 196 patches"};
}

struct CoverageFixture {
  std::string name;
  ForegroundMask fg;
  AugmentKind kind;
  std::uint64_t seed;
};

Outcome coverage_expectation() {
  std::vector<CoverageFixture> fixtures;
  fixtures.push_back({"center square / cc", testing::centered_square_mask(224, 224, 0.25),
                      AugmentKind::kCc, 1});
  fixtures.push_back({"center square / resize", testing::centered_square_mask(375, 500, 0.5),
                      AugmentKind::kResize, 2});
  fixtures.push_back({"center square / src", testing::centered_square_mask(375, 500, 0.4),
                      AugmentKind::kSrc, 3});
  fixtures.push_back({"blob / src", testing::random_blob_mask(300, 240, 4), AugmentKind::kSrc, 4});
  fixtures.push_back({"blob / rrc", testing::random_blob_mask(375, 500, 5), AugmentKind::kRrc, 5});
  fixtures.push_back({"blob / rrc 2", testing::random_blob_mask(480, 360, 6), AugmentKind::kRrc, 6});
  fixtures.push_back({"corner rect / rrc",
                      testing::rect_mask(256, 256, {10, 20, 100, 80}), AugmentKind::kRrc, 7});
  fixtures.push_back({"off-center rect / cc",
                      testing::rect_mask(200, 320, {30, 40, 120, 150}), AugmentKind::kCc, 8});
  fixtures.push_back({"blob / bg", testing::random_blob_mask(333, 444, 9), AugmentKind::kBg, 9});
  fixtures.push_back({"small image blob / rrc", testing::random_blob_mask(90, 120, 10),
                      AugmentKind::kRrc, 10});

  const PatchGrid grid{16, 14, 14};
  double worst = 0.0;
  std::string worst_name;
  for (const auto& f : fixtures) {
    AugmentSpec spec;
    spec.kind = f.kind;
    const AugmentPlan plan = plan_augment(f.fg.height(), f.fg.width(), spec, f.seed, &f.fg);
    const double j = *coverage_of_crop(f.fg, plan.geometry);
    const MaskedCoverage masked(f.fg, plan.geometry, grid);
    double sum = 0.0;
    for (int s = 0; s < 10000; ++s) sum += *masked.evaluate(random_mask(grid, 0.75, derive_seed(f.seed, s)));
    const double dev = std::abs(sum / 10000.0 - 0.25 * j);
    if (dev >= worst) {
      worst = dev;
      worst_name = f.name;
    }
  }
  return {worst <= 0.005, "10 fixtures x 10^4 masks: max |E[J masked] - 0.25 J| = " +
                              fmt("%.5f", worst) + " (" + worst_name + ")"};
}

Outcome directional_ordering() {
  const std::vector<std::pair<int, int>> dims = {{224, 224}, {300, 400}, {400, 300}, {375, 500},
                                                 {256, 384}, {512, 512}, {333, 250}, {240, 320}};
  std::vector<ForegroundMask> corpus;
  for (auto [h, w] : dims) corpus.push_back(testing::centered_square_mask(h, w, 0.5));

  const std::vector<AugmentKind> kinds = {AugmentKind::kSrc, AugmentKind::kRrc, AugmentKind::kCc,
                                          AugmentKind::kResize, AugmentKind::kBg};
  std::map<AugmentKind, double> sums;
  constexpr int kDraws = 4000;
  for (int d = 0; d < kDraws; ++d) {
    const ForegroundMask& fg = corpus[static_cast<std::size_t>(d) % corpus.size()];
    const std::uint64_t seed = derive_seed(2024, d);
    for (AugmentKind kind : kinds) {
      AugmentSpec spec;
      spec.kind = kind;
      const AugmentPlan plan = plan_augment(fg.height(), fg.width(), spec, seed, &fg);
      sums[kind] += *coverage_of_crop(fg, plan.geometry);
    }
  }
  std::ostringstream detail;
  detail << kDraws << " draws, mean J:";
  bool bg_lowest = true;
  for (AugmentKind kind : kinds) {
    detail << ' ' << to_string(kind) << '=' << fmt("%.4f", sums[kind] / kDraws);
    if (kind != AugmentKind::kBg && !(sums[AugmentKind::kBg] < sums[kind])) bg_lowest = false;
  }
  const double gap = (sums[AugmentKind::kSrc] - sums[AugmentKind::kRrc]) / kDraws;
  detail << ", src-rrc=" << fmt("%.4f", gap);
  return {gap >= 0.05 && bg_lowest, detail.str()};
}

Outcome loss_fixtures() {
  // 2x4 single-channel image, patch 2: patch 0 = [1 2; 3 4], patch 1 = [0 0; 0 1].
  const PatchGrid grid{2, 1, 2};
  MaskPattern both{grid, {0, 0}, 1.0, 0};
  Patches target(2, 4);
  target.values = {1, 2, 3, 4, 0, 0, 0, 1};
  Patches pred(2, 4);
  pred.values = {0, 0, 0, 0, 1, -1, 1, -1};

  double err = 0.0;
  // Perfect reconstruction, raw targets.
  const LossSpec raw_l2{Distance::kL2, false, 1e-6};
  const LossSpec raw_l1{Distance::kL1, false, 1e-6};
  err = std::max(err, std::abs(masked_loss(target, target, both, raw_l2)));
  err = std::max(err, std::abs(masked_loss(target, target, both, raw_l1)));
  // One masked patch, zero target, 0.5 prediction.
  const PatchGrid one{2, 1, 1};
  const MaskPattern single{one, {0}, 1.0, 0};
  Patches zeros(1, 4);
  Patches halves(1, 4);
  halves.values.assign(4, 0.5);
  err = std::max(err, std::abs(masked_loss(halves, zeros, single, raw_l2) - 0.25));
  // Two patches with per-patch standardization; values from exact decimal arithmetic.
  const LossSpec norm_l2{Distance::kL2, true, 1e-6};
  const LossSpec norm_l1{Distance::kL1, true, 1e-6};
  err = std::max(err, std::abs(masked_loss(pred, target, both, norm_l2) - 2.077345732040303841));
  err = std::max(err, std::abs(masked_loss(pred, target, both, norm_l1) - 1.235887663430001523));

  // Visible rows never influence the loss.
  const PatchGrid g14{16, 14, 14};
  const Image img = random_image(224, 224, 3, 4242);
  const Patches tgt = patchify(img, g14);
  bool invariant = true;
  for (int s = 0; s < 20; ++s) {
    const MaskPattern m = random_mask(g14, 0.75, derive_seed(5, s));
    Patches p = patchify(random_image(224, 224, 3, 700 + s), g14);
    Patches q = p;
    std::mt19937_64 gen(s);
    for (int i = 0; i < g14.count(); ++i)
      if (m.is_visible(i))
        for (double& v : q.row(i)) v = (gen() % 3 == 0) ? std::nan("") : static_cast<double>(gen());
    for (const LossSpec& spec : {norm_l2, norm_l1, raw_l2, raw_l1}) {
      const double a = masked_loss(p, tgt, m, spec);
      const double b = masked_loss(q, tgt, m, spec);
      invariant = invariant && std::memcmp(&a, &b, sizeof(double)) == 0;
    }
  }
  return {err < 1e-9 && invariant, "max fixture error " + fmt("%.3g", err) +
                                       (invariant ? ", bit-identical under visible-row changes"
                                                  : ", visible rows changed the loss")};
}

Outcome band_psnr_closed_form() {
  const int h = 64;
  const int w = 64;
  const std::vector<double> edges = default_band_edges(h, w);
  double worst_db = 0.0;
  bool sentinel_ok = true;
  int cases = 0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    for (double m : {1e-2, 1e-3, 1e-5}) {
      const Image ref = random_image(h, w, 3, 31 + k);
      // Random real field, then keep only bins whose radius lies in band k.
      Spectrum noise_spec = dft(random_image(h, w, 3, 77 + k));
      for (int c = 0; c < 3; ++c)
        for (int u = 0; u < h; ++u)
          for (int v = 0; v < w; ++v) {
            const double rad = testing::oracle_radius(h, w, u, v);
            if (!(rad >= edges[k] && rad < edges[k + 1])) noise_spec.at(c, u, v) = 0.0;
          }
      Image noise = idft(noise_spec).image;
      double power = 0.0;
      for (double v : noise.data()) power += v * v;
      power /= static_cast<double>(noise.size());
      const double gain = std::sqrt(m / power);
      Image cand = ref;
      for (std::size_t i = 0; i < cand.size(); ++i) cand.data()[i] += gain * noise.data()[i];
      const BandProfile p = band_psnr(ref, cand, edges);
      for (std::size_t b = 0; b < p.bands.size(); ++b) {
        if (b == k) {
          sentinel_ok = sentinel_ok && !p.bands[b].infinite;
          worst_db = std::max(worst_db, std::abs(p.bands[b].psnr_db - 10.0 * std::log10(1.0 / m)));
        } else {
          sentinel_ok = sentinel_ok && p.bands[b].infinite;
        }
      }
      ++cases;
    }
  }
  return {worst_db <= 0.01 && sentinel_ok,
          std::to_string(cases) + " band/MSE cases on 64x64x3: max |PSNR - 10 log10(1/m)| = " +
              fmt("%.2e dB", worst_db) +
              (sentinel_ok ? ", other bands infinite" : ", sentinel missing")};
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    files[e.path().filename().string()] = testing::read_file(e.path());
  return files;
}

Outcome gen_targets_determinism() {
  testing::TempDir tmp("accept_determinism");
  const auto in = tmp.path() / "images";
  const auto masks = tmp.path() / "masks";
  std::filesystem::create_directories(in);
  std::filesystem::create_directories(masks);
  std::mt19937_64 gen(8);
  for (int i = 0; i < 50; ++i) {
    const int h = 120 + static_cast<int>(gen() % 300);
    const int w = 120 + static_cast<int>(gen() % 300);
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03d", i);
    save_png(in / (std::string(name) + ".png"), random_image(h, w, i % 7 == 0 ? 1 : 3, 600 + i));
    save_mask_png(masks / (std::string(name) + ".png"), testing::random_blob_mask(h, w, i));
  }

  std::vector<std::map<std::string, std::string>> runs;
  std::size_t files = 0;
  const std::vector<std::pair<AugmentKind, int>> configs = {
      {AugmentKind::kSrc, 1}, {AugmentKind::kSrc, 4}, {AugmentKind::kSrc, 1},
      {AugmentKind::kBg, 1},  {AugmentKind::kBg, 3}};
  bool same = true;
  std::ostringstream null_log;
  std::map<AugmentKind, std::map<std::string, std::string>> first;
  for (std::size_t r = 0; r < configs.size(); ++r) {
    PipelineConfig cfg;
    cfg.augment.kind = configs[r].first;
    cfg.threads = configs[r].second;
    cfg.seed = 123;
    cfg.input_dir = in;
    cfg.mask_dir = masks;
    cfg.output_dir = tmp.path() / ("out_" + std::to_string(r));
    const GenSummary summary = cmd_gen_targets(cfg, null_log);
    if (summary.written != 50) same = false;
    auto snap = snapshot(cfg.output_dir);
    files += snap.size();
    auto it = first.find(cfg.augment.kind);
    if (it == first.end()) {
      first.emplace(cfg.augment.kind, std::move(snap));
    } else if (it->second != snap) {
      same = false;
    }
  }
  return {same, std::to_string(configs.size()) +
                    " gen-targets runs over 50 images (threads 1/3/4, src and bg), " +
                    std::to_string(files) + " files compared" +
                    (same ? ", byte-identical" : ", outputs differ")};
}

Outcome fft_speed() {
  const Image img = random_image(224, 224, 1, 11);
  auto t0 = Clock::now();
  Image fast;
  int reps = 0;
  while (reps < 20 || seconds_since(t0) < 0.2) {
    fast = low_freq_target(img, 40.0);
    ++reps;
  }
  const double fft_secs = seconds_since(t0) / reps;
  t0 = Clock::now();
  const Image slow = low_freq_target_naive(img, 40.0);
  const double naive_secs = seconds_since(t0);
  const double ratio = naive_secs / fft_secs;
  const double diff = max_abs_diff(fast, slow);
  return {ratio >= 10.0 && diff < 1e-6,
          "224x224 r=40: fft " + fmt("%.3g s", fft_secs) + ", direct " + fmt("%.3g s", naive_secs) +
              ", speedup " + fmt("%.0fx", ratio) + ", max diff " + fmt("%.2g", diff)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dft-oracle", dft_oracle},
      {"spectral-support", spectral_support},
      {"parseval-linearity", parseval_linearity},
      {"masking", masking_counts},
      {"coverage-expectation", coverage_expectation},
      {"directional-ordering", directional_ordering},
      {"loss-fixtures", loss_fixtures},
      {"band-psnr-closed-form", band_psnr_closed_form},
      {"determinism", gen_targets_determinism},
      {"performance", fft_speed},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out{false, ""};
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
