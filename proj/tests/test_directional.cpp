// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "core/directional.hpp"
#include "core/error.hpp"

using namespace weylab;

TEST_SUITE("directional") {
  TEST_CASE("frame at the double-well saddle") {
    const auto bm = builtin_model("double_well_2d");
    const auto f = build_direction_frame(bm.model, PhaseVector::Zero(4));
    CHECK(f.theta[0] > 0.0);
    CHECK(f.theta[1] > 0.0);
    CHECK(f.radius > 0.0);
    CHECK(f.det_w > 0.0);
    // e3 is a pure momentum direction of unit length.
    CHECK(f.directions[2].head(2).norm() == doctest::Approx(0.0));
    CHECK(f.directions[2].norm() == doctest::Approx(1.0));
    CHECK((f.basis * f.inverse - PhaseMatrix::Identity(4, 4)).norm() < 1e-12);
  }

  TEST_CASE("frames need two dimensions") {
    const auto bm = builtin_model("harmonic");
    CHECK_THROWS_AS(build_direction_frame(bm.model, PhaseVector::Zero(2)), Error);
  }

  TEST_CASE("slices far from the ball are empty") {
    const auto bm = builtin_model("double_well_2d");
    const auto f = build_direction_frame(bm.model, PhaseVector::Zero(4));
    PhaseVector v = PhaseVector::Constant(4, 5.0);
    for (int k = 1; k <= 3; ++k)
      CHECK(directional_measure(bm.model, f, k, v, 1e-2, 0.4, 2.0) == 0.0);
  }

  TEST_CASE("slice measures scale like h^delta0") {
    const auto bm = builtin_model("double_well_2d");
    const auto f = build_direction_frame(bm.model, PhaseVector::Zero(4));
    const std::vector<double> hs{1e-3, 1e-4, 1e-5, 1e-6};
    for (int k = 1; k <= 3; ++k) {
      const auto s = directional_sweep(bm.model, f, k, hs, 0.4, 1.5, 20, 1);
      CHECK(s.violations == 0);
      CHECK(s.expected_exponent == doctest::Approx(0.4));
      CHECK(s.fit.slope >= s.expected_exponent - 0.05);
    }
  }

  TEST_CASE("product of slice bounds dominates the ball volume") {
    const auto bm = builtin_model("double_well_2d");
    const auto f = build_direction_frame(bm.model, PhaseVector::Zero(4));
    const std::vector<double> hs{1e-2, 1e-3, 1e-4, 1e-5};
    std::array<double, 3> b{};
    for (int k = 1; k <= 3; ++k) {
      const auto s = directional_sweep(bm.model, f, k, hs, 0.4, 1.5, 20, 1);
      b[k - 1] = s.constant * std::pow(hs.front(), s.expected_exponent);
    }
    const auto ball = ball_sublevel_volume(bm.model, f, hs.front(), 0.4, 1.5, 100000, 1);
    const auto fb = fubini_bound(f, b);
    CHECK(fb.product + 3 * ball.std_error >= ball.value);
    CHECK(fb.single >= fb.product);
  }
}
