// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/phasevol.hpp"

using namespace weylab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("phasevol") {
  TEST_CASE("harmonic sublevel area is pi E") {
    const auto bm = builtin_model("harmonic");
    for (double e : {0.5, 1.0, 2.0}) {
      const auto w = weyl_volume(bm.model, bm.box, e);
      CHECK(w.value == doctest::Approx(kPi * e).epsilon(1e-10));
    }
  }

  TEST_CASE("harmonic shells are annuli of area 2 pi h") {
    const auto bm = builtin_model("harmonic");
    for (double h : {0.1, 0.03, 0.01}) {
      const auto s = shell_volume(bm.model, bm.box, 1.0, h);
      CHECK(s.value == doctest::Approx(2 * kPi * h).epsilon(1e-9));
    }
  }

  TEST_CASE("separable harmonic four-ball volume") {
    const auto bm = builtin_model("separable_harmonic_2d");
    VolumeOptions o;
    o.budget = std::size_t{1} << 18;
    const auto w = weyl_volume(bm.model, bm.box, 1.0, o);
    CHECK(std::abs(w.value - kPi * kPi / 2) <= 3 * w.std_error);
    CHECK(w.std_error > 0.0);
  }

  TEST_CASE("volumes are reproducible from the seed") {
    const auto bm = builtin_model("double_well_2d");
    VolumeOptions o;
    o.budget = std::size_t{1} << 16;
    o.seed = 42;
    const auto a = weyl_volume(bm.model, bm.box, 1.0, o);
    const auto b = weyl_volume(bm.model, bm.box, 1.0, o);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    o.seed = 43;
    CHECK(weyl_volume(bm.model, bm.box, 1.0, o).value != a.value);
  }

  TEST_CASE("weyl volume is nondecreasing in E") {
    const auto bm = builtin_model("double_well_2d");
    VolumeOptions o;
    o.budget = std::size_t{1} << 16;
    VolumeEstimate prev = weyl_volume(bm.model, bm.box, 0.25, o);
    for (double e = 0.5; e <= 1.5; e += 0.25) {
      const auto cur = weyl_volume(bm.model, bm.box, e, o);
      CHECK(cur.value + 3 * std::hypot(cur.std_error, prev.std_error) >= prev.value);
      prev = cur;
    }
  }

  TEST_CASE("sublevel difference equals the stacked shell volume") {
    const auto bm = builtin_model("double_well_2d");
    VolumeOptions o;
    o.budget = std::size_t{1} << 18;
    const auto w1 = weyl_volume(bm.model, bm.box, 0.9, o);
    const auto w2 = weyl_volume(bm.model, bm.box, 1.1, o);
    const auto s = shell_volume(bm.model, bm.box, 1.0, 0.1, o);
    const double err = std::sqrt(w1.std_error * w1.std_error + w2.std_error * w2.std_error +
                                 s.std_error * s.std_error);
    CHECK(w2.value - w1.value >= 0.0);
    CHECK(std::abs((w2.value - w1.value) - s.value) <= 4 * err);
  }

  TEST_CASE("remainder functional of the harmonic oscillator is linear in h") {
    const auto bm = builtin_model("harmonic");
    std::vector<double> lh, lr;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
      const auto r = remainder_functional(bm.model, bm.box, 1.0, 0.1, h);
      CHECK(r.value >= h);
      CHECK(r.value == doctest::Approx(h * (1 + 2 * kPi)).epsilon(1e-8));
      CHECK(r.grid_size == static_cast<std::size_t>(std::ceil(4 * std::pow(h, -0.1))) + 1);
    }
  }

  TEST_CASE("near-critical set is empty away from critical values") {
    const auto bm = builtin_model("harmonic");
    const auto nc = near_critical_volume(bm.model, bm.box, 1.0, 0.5, 1e-3, 0.45, 2.0);
    CHECK(nc.volume.value == 0.0);
    CHECK(nc.cloud_points == 0);
  }

  TEST_CASE("near-critical volume of the double well shrinks faster than h") {
    const auto bm = builtin_model("double_well_2d");
    NearCriticalOptions o;
    o.volume.budget = std::size_t{1} << 16;
    const auto a = near_critical_volume(bm.model, bm.box, 1.0, 0.5, 1e-2, 0.4, 2.0, o);
    const auto b = near_critical_volume(bm.model, bm.box, 1.0, 0.5, 1e-3, 0.4, 2.0, o);
    CHECK(a.volume.value > 0.0);
    CHECK(b.volume.value > 0.0);
    CHECK(std::log(a.volume.value / b.volume.value) / std::log(10.0) >= 1.05);
  }
}
