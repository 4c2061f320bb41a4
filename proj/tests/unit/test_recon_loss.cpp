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

#include <cmath>
#include <random>

#include "doctest.h"
#include "pixmim/frequency.hpp"
#include "pixmim/recon_loss.hpp"
#include "pixmim/rng.hpp"
#include "test_support.hpp"

using namespace pixmim;
using pixmim::testing::random_image;

namespace {

const PatchGrid kGrid{8, 4, 4};

Patches random_patches(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Patches p(count, dim);
  for (double& v : p.values) v = dist(gen);
  return p;
}

// Straight long-double reference of the masked loss.
double oracle_loss(const Patches& pred, const Patches& target, const MaskPattern& m,
                   const LossSpec& spec) {
  long double total = 0.0L;
  int n = 0;
  for (std::size_t i = 0; i < target.count; ++i) {
    if (m.is_visible(static_cast<int>(i))) continue;
    const auto t = target.row(i);
    const auto p = pred.row(i);
    long double mean = 0.0L, var = 0.0L;
    for (double v : t) mean += v;
    mean /= t.size();
    for (double v : t) var += (v - mean) * (v - mean);
    const long double sd = std::sqrt(var / t.size());
    long double acc = 0.0L;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const long double tv = spec.normalize_per_patch ? (t[k] - mean) / (sd + spec.eps) : t[k];
      const long double d = p[k] - tv;
      acc += spec.distance == Distance::kL2 ? d * d : std::fabs(d);
    }
    total += acc / t.size();
    ++n;
  }
  return static_cast<double>(total / n);
}

}  // namespace

TEST_CASE("hand-computed fixture") {
  const PatchGrid g{2, 1, 2};
  Patches target(2, 4);
  target.values = {1, 2, 3, 4, 0, 0, 0, 1};
  Patches pred(2, 4);
  pred.values = {0, 0, 0, 0, 1, -1, 1, -1};
  const MaskPattern both{g, {0, 0}, 1.0, 0};
  CHECK(masked_loss(pred, target, both, {Distance::kL2, true, 1e-6}) ==
        doctest::Approx(2.077345732040303841).epsilon(1e-14));
  CHECK(masked_loss(pred, target, both, {Distance::kL1, true, 1e-6}) ==
        doctest::Approx(1.235887663430001523).epsilon(1e-14));
  // Raw: patch A mean (1+4+9+16)/4 = 7.5, patch B (1+1+1+4)/4 = 1.75.
  CHECK(masked_loss(pred, target, both, {Distance::kL2, false, 1e-6}) == doctest::Approx(4.625));
  const MaskPattern only_b{g, {1, 0}, 0.5, 0};
  CHECK(masked_loss(pred, target, only_b, {Distance::kL1, false, 1e-6}) == doctest::Approx(1.25));
}

TEST_CASE("loss matches a reference implementation") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Patches t = random_patches(16, 8 * 8 * 3, s);
    const Patches p = random_patches(16, 8 * 8 * 3, s + 1000);
    const MaskPattern m = random_mask(kGrid, 0.75, s);
    for (const LossSpec spec : {LossSpec{Distance::kL2, true, 1e-6}, LossSpec{Distance::kL1, true, 1e-6},
                                LossSpec{Distance::kL2, false, 1e-6}, LossSpec{Distance::kL1, false, 1e-6}}) {
      REQUIRE(masked_loss(p, t, m, spec) == doctest::Approx(oracle_loss(p, t, m, spec)).epsilon(1e-12));
    }
  }
}

TEST_CASE("loss is non-negative and zero only on a match") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Patches t = random_patches(16, 192, s);
    const MaskPattern m = random_mask(kGrid, 0.5, s);
    const LossSpec raw{Distance::kL2, false, 1e-6};
    CHECK(masked_loss(t, t, m, raw) == 0.0);
    Patches p = t;
    const auto masked = masked_indices(m);
    p.row(static_cast<std::size_t>(masked[s % masked.size()]))[s % 192] += 1e-3;
    CHECK(masked_loss(p, t, m, raw) > 0.0);
    CHECK(masked_loss(random_patches(16, 192, s + 7), t, m) >= 0.0);
  }
}

TEST_CASE("normalized loss ignores target scale") {
  const LossSpec exact{Distance::kL2, true, 0.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Patches t = random_patches(16, 192, s);
    const Patches p = random_patches(16, 192, s + 99);
    const MaskPattern m = random_mask(kGrid, 0.75, s);
    const double base = masked_loss(p, t, m, exact);
    for (double a : {0.5, 0.9, 1.3, 2.0}) {
      Patches scaled = t;
      for (double& v : scaled.values) v = v * a + 3.0;
      CHECK(masked_loss(p, scaled, m, exact) == doctest::Approx(base).epsilon(1e-12));
      // eps shrinks each standardized value by a factor sd / (sd + eps).
      const double with_eps = masked_loss(p, scaled, m);
      CHECK(std::abs(with_eps - base) <= 4.0 * 1e-6 / (0.5 * a) * (1.0 + base));
    }
  }
}

TEST_CASE("visible rows are never read") {
  const Patches t = random_patches(16, 192, 5);
  Patches p = random_patches(16, 192, 6);
  const MaskPattern m = random_mask(kGrid, 0.75, 5);
  const double before = masked_loss(p, t, m);
  for (std::size_t i = 0; i < p.count; ++i)
    if (m.is_visible(static_cast<int>(i)))
      for (double& v : p.row(i)) v = std::nan("");
  CHECK(masked_loss(p, t, m) == before);
}

TEST_CASE("loss argument checks") {
  const Patches t = random_patches(16, 192, 1);
  CHECK_THROWS_AS(masked_loss(random_patches(15, 192, 1), t, random_mask(kGrid, 0.5, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(masked_loss(random_patches(16, 191, 1), t, random_mask(kGrid, 0.5, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(masked_loss(t, t, random_mask(kGrid, 0.0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(masked_loss(t, t, random_mask(PatchGrid{8, 2, 2}, 0.5, 1)), std::invalid_argument);
}

TEST_CASE("image overload patchifies the target") {
  const Image img = random_image(32, 32, 3, 4);
  const Patches p = random_patches(16, 192, 8);
  const MaskPattern m = random_mask(kGrid, 0.75, 2);
  CHECK(masked_loss(p, img, m) == masked_loss(p, patchify(img, kGrid), m));
}

TEST_CASE("target patches") {
  const Image img = random_image(64, 64, 3, 9);
  const PatchGrid g{16, 4, 4};
  CHECK(target_patches(img, std::nullopt, g) == patchify(img, g));
  CHECK(target_patches(img, 20.0, g) == patchify(low_freq_target(img, 20.0), g));

  const Image flat(64, 64, 3, 0.4);
  const Patches fp = target_patches(flat, 5.0, g);
  for (double v : fp.values) REQUIRE(std::abs(v - 0.4) < 1e-12);
}

TEST_CASE("low-pass targets drop out-of-band prediction error") {
  // A prediction off only by a high-frequency cosine is penalized by the raw
  // target and not by the low-pass one.
  const int n = 64;
  const Image base = testing::cosine_image(n, n, {{0.3, 2, 3}}, 0.5);
  const Image detailed = testing::cosine_image(n, n, {{0.3, 2, 3}, {0.2, 20, 17}}, 0.5);
  const PatchGrid g{16, 4, 4};
  const MaskPattern m = random_mask(g, 0.75, 1);
  const LossSpec raw{Distance::kL2, false, 1e-6};
  const Patches pred = patchify(base, g);
  CHECK(masked_loss(pred, target_patches(detailed, std::nullopt, g), m, raw) > 1e-3);
  CHECK(masked_loss(pred, target_patches(detailed, 10.0, g), m, raw) < 1e-20);
}

TEST_CASE("distance names") {
  CHECK(parse_distance("l1") == Distance::kL1);
  CHECK(parse_distance("l2") == Distance::kL2);
  CHECK(to_string(Distance::kL1) == "l1");
  CHECK(to_string(parse_distance(to_string(Distance::kL2))) == "l2");
  CHECK_THROWS_AS(parse_distance("L3"), std::invalid_argument);
}

TEST_CASE("normalize patch") {
  std::vector<double> v{1, 2, 3, 4};
  normalize_patch(v, 0.0);
  double mean = 0, sq = 0;
  for (double x : v) mean += x;
  for (double x : v) sq += x * x;
  CHECK(std::abs(mean) < 1e-15);
  CHECK(sq / 4 == doctest::Approx(1.0));
  std::vector<double> c{5, 5, 5};
  normalize_patch(c, 1e-6);
  for (double x : c) CHECK(x == 0.0);
}
