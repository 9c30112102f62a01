// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "core/error.hpp"
#include "core/operator.hpp"
#include "core/rng.hpp"

using namespace weylab;

namespace {

OperatorGrid axis_grid(const OperatorGrid& g, int k) {
  OperatorGrid a;
  a.dimension = 1;
  a.lower[0] = g.lower[k];
  a.upper[0] = g.upper[k];
  a.points[0] = g.points[k];
  a.stencil_order = g.stencil_order;
  return a;
}

// Continuum counts of h(2(n1 + n2) + 2) below E: strictly below and including the level at E.
std::pair<long, long> tensor_counts(double h, double e) {
  long strict = 0, closed = 0;
  for (int n = 0; n < 1000; ++n) {
    const double level = h * (2 * n + 2);
    if (level < e - 1e-12) strict += n + 1;
    if (level <= e + 1e-12) closed += n + 1;
  }
  return {strict, closed};
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("harmonic oscillator levels h(2n+1)") {
    const auto bm = builtin_model("harmonic");
    const double h = 0.05;
    auto g = confining_grid(bm.model, h, 1.0, 2.0, 4);
    const auto op = assemble(bm.model, nullptr, h, 0.45, g, OperatorVariant::raw);
    const auto s = eigenvalues_below(op, 0.99, 0.0);
    REQUIRE(s.count == 10);
    for (std::size_t n = 0; n < s.eigenvalues.size(); ++n)
      CHECK(s.eigenvalues[n] == doctest::Approx(h * (2 * n + 1)).epsilon(1e-3));
  }

  TEST_CASE("separable counts equal the discrete tensor-sum count") {
    const auto bm = builtin_model("separable_harmonic_2d");
    const auto h1 = builtin_model("harmonic");
    for (double h : {0.1, 0.07, 0.05}) {
      const auto g = confining_grid(bm.model, h, 1.0, 2.0, 4);
      const auto op = assemble(bm.model, nullptr, h, 0.45, g, OperatorVariant::raw);
      const auto n = static_cast<long>(count_below(op, 1.0).count);
      const auto e0 = eigenvalues_below(
          assemble(h1.model, nullptr, h, 0.45, axis_grid(g, 0), OperatorVariant::raw), 1.0, 0.0);
      const auto e1 = eigenvalues_below(
          assemble(h1.model, nullptr, h, 0.45, axis_grid(g, 1), OperatorVariant::raw), 1.0, 0.0);
      long pairs = 0;
      for (double a : e0.eigenvalues)
        for (double b : e1.eigenvalues) pairs += a + b < 1.0 ? 1 : 0;
      CHECK(n == pairs);
      const auto [strict, closed] = tensor_counts(h, 1.0);
      CHECK(n >= strict - 2);
      CHECK(n <= closed + 2);
    }
  }

  TEST_CASE("plus and minus variants bracket the raw count") {
    const auto bm = builtin_model("double_well_2d");
    const auto kernel = build_mollifier(2, 1.0);
    for (double h : {0.1, 0.07}) {
      const auto g = confining_grid(bm.model, h, 1.0, 2.0, 4);
      const auto ops = assemble_bracket(bm.model, kernel, h, 0.4, g);
      for (double e : {0.5, 1.0, 1.5}) {
        const auto raw = count_below(ops[0], e).count;
        CHECK(count_below(ops[1], e).count <= raw);
        CHECK(raw <= count_below(ops[2], e).count);
      }
    }
  }

  TEST_CASE("inertia count matches dense eigenvalues") {
    const auto bm = builtin_model("double_well_2d");
    OperatorGrid g;
    g.dimension = 2;
    g.lower = {-2.0, -2.0, 0.0};
    g.upper = {2.0, 2.0, 0.0};
    g.points = {24, 20, 0};
    g.stencil_order = 4;
    const double h = 0.4;
    const auto op = assemble(bm.model, nullptr, h, 0.4, g, OperatorVariant::raw);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix());
    CHECK((dense - dense.transpose()).norm() < 1e-12);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense).eigenvalues();
    CounterStream rng(5, 0);
    for (int i = 0; i < 20; ++i) {
      const double e = rng.uniform(0.0, 4.0);
      std::size_t expect = 0;
      for (int k = 0; k < ev.size(); ++k) expect += ev[k] < e ? 1 : 0;
      CHECK(count_below(op, e).count == expect);
    }
    const auto s = eigenvalues_below(op, 2.0, 0.0);
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
      CHECK(s.eigenvalues[k] == doctest::Approx(ev[static_cast<int>(k)]).epsilon(1e-9));
  }

  TEST_CASE("quadratic form is nonnegative for a nonnegative potential") {
    const auto bm = builtin_model("separable_harmonic_2d");
    const auto g = confining_grid(bm.model, 0.1, 1.0, 2.0, 2);
    const auto op = assemble(bm.model, nullptr, 0.1, 0.45, g, OperatorVariant::raw);
    CounterStream rng(9, 0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(op.size()));
    for (int t = 0; t < 10; ++t) {
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1, 1);
      CHECK(op.quadratic_form(u) >= 0.0);
    }
  }

  TEST_CASE("coarse grids raise a resolution fault") {
    const auto bm = builtin_model("separable_harmonic_2d");
    auto g = confining_grid(bm.model, 0.05, 1.0, 2.0, 4);
    g.points = {10, 10, 0};
    try {
      assemble(bm.model, nullptr, 0.05, 0.45, g, OperatorVariant::raw);
      FAIL("expected a resolution fault");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::resolution);
    }
  }

  TEST_CASE("boxes that cut the energy surface raise a confinement fault") {
    const auto bm = builtin_model("harmonic");
    OperatorGrid g;
    g.dimension = 1;
    g.lower[0] = -0.5;
    g.upper[0] = 0.5;
    g.points[0] = 200;
    g.energy_ceiling = 1.0;
    try {
      assemble(bm.model, nullptr, 0.05, 0.45, g, OperatorVariant::raw);
      FAIL("expected a confinement fault");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::confinement);
    }
  }

  TEST_CASE("one-dimensional second-order operators are tridiagonal") {
    const auto bm = builtin_model("harmonic");
    auto g = confining_grid(bm.model, 0.05, 1.0, 2.0, 2);
    const auto op = assemble(bm.model, nullptr, 0.05, 0.45, g, OperatorVariant::raw);
    CHECK(op.is_tridiagonal());
    CHECK(count_below(op, 1.0).method == "sturm");
  }
}
