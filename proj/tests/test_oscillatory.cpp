// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "core/error.hpp"
#include "core/oscillatory.hpp"

using namespace weylab;

namespace {
Amplitude gaussian(double s, double radius) {
  Amplitude b;
  b.center = PhaseVector::Zero(2);
  b.radius = radius;
  b.value = [s](const PhaseVector& v) { return std::exp(-v.squaredNorm() / (s * s)); };
  b.description = "gaussian";
  return b;
}
}  // namespace

TEST_SUITE("oscillatory") {
  TEST_CASE("gaussian amplitude against the closed form") {
    const auto bm = builtin_model("harmonic");
    const double s = 0.5;
    for (double t : {0.0, 0.05, 0.3}) {
      const double h = 0.1;
      const auto r = oscillatory_integral(bm.model, gaussian(s, 3.0), t, h);
      const std::complex<double> exact =
          std::numbers::pi / std::complex<double>(1.0 / (s * s), -t / h) /
          (2 * std::numbers::pi * h);
      CHECK(std::abs(r.value - exact) <= 1e-8 * std::abs(exact));
      CHECK(r.reliable);
    }
  }

  TEST_CASE("reversing time conjugates the integral") {
    const auto bm = builtin_model("harmonic");
    PhaseVector c(2);
    c << 1.0, 0.0;
    const auto b = bump_amplitude(c, 0.3);
    const auto fwd = oscillatory_integral(bm.model, b, 0.2, 0.02);
    const auto bwd = oscillatory_integral(bm.model, b, -0.2, 0.02);
    CHECK(std::abs(fwd.value - std::conj(bwd.value)) <= 1e-10 * std::max(1.0, std::abs(fwd.value)));
  }

  TEST_CASE("decay exponent") {
    CHECK(decay_kappa(0.95, 0.41) == doctest::Approx(0.025));
    CHECK(decay_kappa(0.96, 0.41) == doctest::Approx(0.02));
    CHECK(decay_kappa(0.92, 0.41) == doctest::Approx(0.01));
  }

  TEST_CASE("mu outside its interval is a configuration error") {
    const auto bm = builtin_model("harmonic");
    PhaseVector c(2);
    c << 1.0, 0.0;
    auto amp = [&](double) { return bump_amplitude(c, 0.3); };
    try {
      nonstationary_decay_check(bm.model, amp, 0.9, 0.41, 2, {1e-2, 1e-3});
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
    }
    CHECK_THROWS_AS(nonstationary_decay_check(bm.model, amp, 1.0, 0.41, 2, {1e-2}), Error);
  }

  TEST_CASE("removing the critical region zeroes the amplitude at the critical point") {
    const auto bm = builtin_model("harmonic");
    const auto b = remove_critical_region(bm.model, bump_amplitude(PhaseVector::Zero(2), 0.5), 0.1);
    CHECK(b.value(PhaseVector::Zero(2)) == 0.0);
    PhaseVector far(2);
    far << 0.2, 0.0;
    CHECK(b.value(far) > 0.0);
  }
}
