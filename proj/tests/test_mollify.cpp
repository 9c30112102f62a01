// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/mollify.hpp"
#include "core/rng.hpp"

using namespace weylab;

TEST_SUITE("mollify") {
  TEST_CASE("kernel has unit mass and vanishing first and second moments") {
    for (int d = 1; d <= 2; ++d) {
      const auto k = build_mollifier(d, 1.0);
      CHECK(k->moment_defects().max() <= 1e-10);
      CHECK(k->rule_defects().max() <= 1e-10);
      const double zero[2] = {0.0, 0.0};
      CHECK(k->value(zero) > 0.0);
      const double outside[2] = {1.0, 0.5};
      CHECK(k->value(std::span<const double>(outside, d)) == 0.0);
    }
  }

  TEST_CASE("kernel derivatives match finite differences") {
    const auto k = build_mollifier(1, 1.0);
    for (double z : {-0.6, -0.2, 0.1, 0.45, 0.8}) {
      const double a[1] = {z + 1e-6}, b[1] = {z - 1e-6}, c[1] = {z};
      const double fd = (k->value(a) - k->value(b)) / 2e-6;
      CHECK(k->derivative(c, MultiIndex{1, 0, 0}) == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  TEST_CASE("convolution reproduces quadratics") {
    const auto k = build_mollifier(2, 1.0);
    auto q = make_field(parse_expression("3 * x1^2 - x1 * x2 + 0.5 * x2^2 + x1 - 2"), 2);
    auto qh = regularize(q, 0.01, 0.45, 0.5, k);
    CounterStream rng(3, 0);
    for (int i = 0; i < 50; ++i) {
      const double x[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      CHECK(qh->value(x) == doctest::Approx(q->value(x)).epsilon(1e-9));
    }
  }

  TEST_CASE("smoothing exponent interval is open") {
    CHECK_THROWS_AS(check_smoothing_exponent(0.4, 0.5), Error);
    CHECK_NOTHROW(check_smoothing_exponent(0.41, 0.5));
    CHECK_THROWS_AS(check_smoothing_exponent(0.5, 0.5), Error);
  }

  TEST_CASE("sup-norm rates on a Holder profile") {
    const auto k = build_mollifier(1, 1.0);
    auto f = make_field(parse_expression("cutoff(x1, 1.5, 3) * abspow(x1, 2.5)"), 1);
    const std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4};
    SmoothingFitOptions opt;
    opt.anchors = {{0.0}};
    opt.sample_count = 200;
    for (int a = 0; a <= 3; ++a) {
      const auto r = fit_smoothing_exponents(f, MultiIndex{a, 0, 0}, hs, 0.41, 0.5, k, opt);
      CHECK(r.expected_slope == doctest::Approx((2.5 - a) * 0.41));
      CHECK(std::abs(r.fit.slope - r.expected_slope) <= 0.2);
    }
  }

  TEST_CASE("quadratic coefficients are annihilated exactly") {
    const auto k = build_mollifier(1, 1.0);
    auto q = make_field(parse_expression("x1^2"), 1);
    const std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4};
    const auto r = fit_smoothing_exponents(q, MultiIndex{0, 0, 0}, hs, 0.41, 0.5, k);
    CHECK(r.exact_annihilation);
  }

  TEST_CASE("momentum shift terms") {
    const auto t = momentum_shift_terms(2, 1, 0.5);
    CHECK(t.size() == 3);
  }
}
