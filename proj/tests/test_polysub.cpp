// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/polysub.hpp"
#include "core/rng.hpp"

using namespace weylab;

TEST_SUITE("polysub") {
  TEST_CASE("closed-form sublevel sets") {
    auto q = poly_sublevel_measure(std::vector<double>{0, 1}, 0.5, {-1, 1});
    CHECK(q.measure == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(q.intervals.size() == 1);
    CHECK(q.intervals[0].lo == doctest::Approx(-0.5));
    CHECK(q.intervals[0].hi == doctest::Approx(0.5));
    q = poly_sublevel_measure(std::vector<double>{0, 0, 1}, 0.25, {-1, 1});
    CHECK(q.measure == doctest::Approx(1.0).epsilon(1e-14));
    q = poly_sublevel_measure(std::vector<double>{-1, 0, 1}, 0.1, {-2, 2});
    CHECK(q.measure == doctest::Approx(2 * (std::sqrt(1.1) - std::sqrt(0.9))).epsilon(1e-12));
    CHECK(q.intervals.size() == 2);
  }

  TEST_CASE("monomials saturate the rate 2 tau^(1/m)") {
    for (int m = 1; m <= 5; ++m) {
      std::vector<double> c(m + 1, 0.0);
      c[m] = 1.0;
      for (double tau : {0.5, 1e-2, 1e-5}) {
        const auto q = poly_sublevel_measure(c, tau, {-3, 3});
        CHECK(q.measure == doctest::Approx(2 * std::pow(tau, 1.0 / m)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("real roots of a factored cubic") {
    // (s - 0.3)(s + 0.7)(s - 0.9)
    const std::vector<double> c{0.189, -0.57, -0.5, 1.0};
    const auto r = real_roots(c, -2, 2);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(0.9).epsilon(1e-12));
  }

  TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(poly_sublevel_measure(std::vector<double>{1, 1}, 0.0, {-1, 1}), Error);
    CHECK_THROWS_AS(poly_sublevel_measure(std::vector<double>{1}, 0.5, {-1, 1}), Error);
  }

  TEST_CASE("exact measure agrees with dense Riemann sampling") {
    constexpr int kPoints = 10000000;
    for (int trial = 0; trial < 50; ++trial) {
      CounterStream rng(11, static_cast<std::uint64_t>(trial));
      const int degree = 1 + static_cast<int>(rng.uniform() * 5) % 5;
      std::vector<double> c;
      for (int k = 0; k <= degree; ++k) c.push_back(rng.uniform(-1, 1));
      const double tau = rng.uniform(0.05, 0.5);
      const Interval dom{-1.5, 1.5};
      const auto q = poly_sublevel_measure(c, tau, dom);
      const double dx = dom.length() / kPoints;
      long long inside = 0;
      for (int i = 0; i < kPoints; ++i)
        if (std::abs(poly_eval(c, dom.lo + (i + 0.5) * dx)) < tau) ++inside;
      const double riemann = inside * dx;
      const double tol = 2 * dom.length() / kPoints * (q.intervals.size() + 1);
      CHECK(std::abs(riemann - q.measure) <= tol);
    }
  }

  TEST_CASE("calibrated rate holds for 200 random polynomials") {
    const std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4};
    const auto rep = verify_sublevel_lemma(1, 200, 5, 0.4, hs);
    CHECK(rep.trials.size() == 200);
    CHECK(rep.violations == 0);
    for (const auto& tr : rep.trials) {
      // Normalization |F^(m)(0)| >= 1.
      double factorial = 1;
      for (int k = 2; k <= tr.degree; ++k) factorial *= k;
      CHECK(std::abs(tr.coefficients.back()) * factorial >= 1.0 - 1e-12);
    }
  }
}
