// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/symbols.hpp"

using namespace weylab;

namespace {

double fd_partial(const SymbolModel& m, PhaseVector v, int i, double step = 1e-5) {
  PhaseVector a = v, b = v;
  a[i] += step;
  b[i] -= step;
  return (m.value(a) - m.value(b)) / (2 * step);
}

}  // namespace

TEST_SUITE("symbols") {
  TEST_CASE("expression values and jets") {
    const Expr e = parse_expression("(x1^2 - 1)^2 + x2^2");
    const double x[2] = {0.5, 0.3};
    CHECK(e.value(x) == doctest::Approx(0.6525).epsilon(1e-14));
    const Jet2 j = e.jet(x);
    CHECK(j.g[0] == doctest::Approx(4 * 0.5 * (0.25 - 1)).epsilon(1e-13));
    CHECK(j.g[1] == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(j.hess(0, 0) == doctest::Approx(12 * 0.25 - 4).epsilon(1e-13));
    CHECK(j.hess(0, 1) == doctest::Approx(0.0));
    CHECK(e.variable_count() == 2);
  }

  TEST_CASE("jet derivatives agree with finite differences on random points") {
    const Expr e = parse_expression("x1^3 * x2 - 2 * x2^2 + abspow(x1, 2.5) + cutoff(x2, 0.5, 1.5)");
    CounterStream rng(7, 0);
    for (int s = 0; s < 200; ++s) {
      double x[2] = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
      const Jet2 j = e.jet(x);
      for (int i = 0; i < 2; ++i) {
        double a[2] = {x[0], x[1]}, b[2] = {x[0], x[1]};
        a[i] += 1e-6;
        b[i] -= 1e-6;
        CHECK(j.g[i] == doctest::Approx((e.value(a) - e.value(b)) / 2e-6).epsilon(1e-6));
        const Jet2 ja = e.jet(a), jb = e.jet(b);
        for (int k = 0; k < 2; ++k)
          CHECK(j.hess(i, k) == doctest::Approx((ja.g[k] - jb.g[k]) / 2e-6).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("malformed expressions are rejected") {
    CHECK_THROWS_AS(parse_expression("x1 +"), Error);
    CHECK_THROWS_AS(parse_expression("(x1"), Error);
    CHECK_THROWS_AS(parse_expression("x7"), Error);
  }

  TEST_CASE("smooth cutoff is a monotone step") {
    CHECK(smooth_cutoff(0.5, 1.0, 2.0)[0] == 1.0);
    CHECK(smooth_cutoff(2.5, 1.0, 2.0)[0] == 0.0);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = smooth_cutoff(1.0 + i / 100.0, 1.0, 2.0)[0];
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      prev = v;
    }
  }

  TEST_CASE("double-well symbol, gradient and Hessian") {
    const auto bm = builtin_model("double_well_2d");
    const auto& m = bm.model;
    PhaseVector v(4);
    v << 0.5, 0.3, -0.2, 0.7;
    CHECK(m.value(v) == doctest::Approx(0.6525 + 0.04 + 0.49).epsilon(1e-13));
    const PhaseVector g = m.gradient(v);
    for (int i = 0; i < 4; ++i) CHECK(g[i] == doctest::Approx(fd_partial(m, v, i)).epsilon(1e-7));
    const PhaseMatrix H = m.hessian(v);
    CHECK((H - H.transpose()).norm() < 1e-14);
    CHECK(H(2, 2) == doctest::Approx(2.0));
    const double x[2] = {0.5, 0.3};
    CHECK(m.min_over_momentum(x) == doctest::Approx(0.6525).epsilon(1e-13));
  }

  TEST_CASE("critical point of the double well at energy 1") {
    const auto bm = builtin_model("double_well_2d");
    const auto pts = find_critical_points(bm.model, bm.box, 1.0, 0.5);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].location.norm() < 1e-8);
    CHECK(pts[0].energy == doctest::Approx(1.0));
    CHECK(pts[0].hessian_rank == 4);
    auto ev = pts[0].hessian_eigenvalues;
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-4.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[3] == doctest::Approx(2.0));
  }

  TEST_CASE("hypothesis checks") {
    const auto dw = builtin_model("double_well_2d");
    const auto r = check_theorem_hypotheses(dw.model, dw.box, 1.0, 0.5);
    CHECK(r.theorem_applicable);
    CHECK(r.confinement_ok);
    CHECK(r.rank_ok);
    const auto h1 = builtin_model("harmonic");
    const auto r1 = check_theorem_hypotheses(h1.model, h1.box, 1.0, 0.5);
    CHECK_FALSE(r1.theorem_applicable);
    CHECK_FALSE(r1.dimension_ok);
    const auto sep = builtin_model("separable_harmonic_2d");
    const auto r2 = check_theorem_hypotheses(sep.model, sep.box, 1.0, 0.5);
    CHECK(r2.rank_vacuous);
    CHECK(r2.theorem_applicable);
  }

  TEST_CASE("ellipticity and built-in registry") {
    for (const auto& name : builtin_model_names()) {
      const auto bm = builtin_model(name);
      CHECK(check_ellipticity(bm.model, bm.box.x_extent, 2000).ok);
    }
    CHECK_THROWS_AS(builtin_model("no_such_model"), Error);
  }

  TEST_CASE("phase box mapping") {
    const PhaseBox box{2, 2.0, 3.0};
    CHECK(box.volume() == doctest::Approx(16.0 * 36.0));
    const double u[4] = {0.0, 0.5, 0.25, 0.999};
    const PhaseVector v = box.map_unit(u);
    CHECK(v[0] == doctest::Approx(-2.0));
    CHECK(v[1] == doctest::Approx(0.0));
    CHECK(v[2] == doctest::Approx(-1.5));
    CHECK(box.contains(v));
  }
}
