// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/quadrature.hpp"
#include "core/smoothing.hpp"

using namespace weylab;

TEST_SUITE("smoothing") {
  TEST_CASE("density is nonnegative with unit mass") {
    for (double h : {0.05, 0.02, 0.01}) {
      const MollifiedCounter m(1.0, h, 0.2, 0.8);
      CHECK(std::abs(m.unit_mass() - 1.0) <= 1e-8);
      for (int i = 0; i <= 2000; ++i) CHECK(m.gamma_tilde(-1.0 + 3.0 * i / 2000) >= 0.0);
    }
  }

  TEST_CASE("density is the Fourier transform of the time cutoff") {
    const double h = 0.05, t0 = 1.0;
    const MollifiedCounter m(t0, h, 0.2, 0.8);
    CHECK(m.gamma1(0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.gamma1(1.01 * t0) == 0.0);
    for (double lambda : {0.0, 0.03, 0.1, 0.25}) {
      const double direct =
          integrate_composite([&](double t) { return m.gamma1(t) * std::cos(t * lambda / h); },
                              -t0, t0, 64, 16) /
          (2 * std::numbers::pi * h);
      CHECK(m.gamma_tilde(lambda) == doctest::Approx(direct).epsilon(1e-6));
    }
  }

  TEST_CASE("window is symmetric about the interval midpoint and tends to the indicator") {
    const MollifiedCounter m(1.0, 0.002, 0.2, 0.8);
    for (double d : {0.0, 0.1, 0.29, 0.31, 0.5}) {
      CHECK(m.window(0.5 + d) == doctest::Approx(m.window(0.5 - d)).epsilon(1e-10));
    }
    CHECK(m.window(0.8) == doctest::Approx(0.5).epsilon(1e-5));
    const double w = m.edge_halfwidth(1e-6);
    REQUIRE(w < 0.3);
    CHECK(std::abs(m.window(0.5) - 1.0) <= 2e-6);
    CHECK(m.window(0.8 + w + 0.6) <= 1e-6);
    CHECK(std::abs(m.window(0.8 + w) - m.indicator(0.8 + w)) <= 2e-6);
    CHECK(std::abs(m.window(0.8 - w) - m.indicator(0.8 - w)) <= 2e-6);
  }

  TEST_CASE("smoothed count differs from the sharp count only through edge eigenvalues") {
    const double h = 0.02;
    const MollifiedCounter m(1.0, h, 0.2, 0.8);
    SpectrumSlice s;
    s.threshold = 0.8;
    s.margin = m.edge_halfwidth(1e-12) + 0.2;
    s.has_eigenvalues = true;
    for (int n = 0; h * (2 * n + 1) <= s.threshold + s.margin; ++n)
      s.eigenvalues.push_back(h * (2 * n + 1));
    s.count = s.eigenvalues.size();
    const auto g = sharp_vs_smoothed_gap(s, m, 4);
    CHECK(g.sharp == 15.0);
    CHECK(std::abs(g.smoothed - g.sharp) <= static_cast<double>(g.edge_count));
    CHECK(g.violations == 0);
    CHECK(g.tail_fit.slope < -2.0);
    CHECK(smoothed_count(s, m) == doctest::Approx(g.smoothed));
  }
}
