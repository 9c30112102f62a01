// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "core/flow.hpp"

using namespace weylab;

namespace {
PhaseVector point(double a, double b) {
  PhaseVector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("harmonic flow is a rotation at angular speed two") {
    const auto bm = builtin_model("harmonic");
    const PhaseVector v0 = point(0.7, -0.4);
    for (double t : {-1.3, -0.2, 0.0, 0.5, 2.0}) {
      const PhaseVector v = flow_map(bm.model, v0, t);
      const double c = std::cos(2 * t), s = std::sin(2 * t);
      CHECK(v(0) == doctest::Approx(v0(0) * c + v0(1) * s).epsilon(1e-9));
      CHECK(v(1) == doctest::Approx(-v0(0) * s + v0(1) * c).epsilon(1e-9));
    }
  }

  TEST_CASE("energy, group law, reversibility and volume on the double well") {
    const auto bm = builtin_model("double_well_2d");
    PhaseVector v0(4);
    v0 << 0.3, -0.5, 0.4, 0.2;
    const auto traj = integrate_flow(bm.model, v0, {-0.5, 0.25, 0.0, 0.5, 1.0});
    CHECK(traj.energy_drift <= 1e-9);
    CHECK((traj.states[2] - v0).norm() == 0.0);
    const PhaseVector a = flow_map(bm.model, flow_map(bm.model, v0, 0.3), 0.4);
    const PhaseVector b = flow_map(bm.model, v0, 0.7);
    CHECK((a - b).norm() <= 1e-8);
    const PhaseVector back = flow_map(bm.model, flow_map(bm.model, v0, 0.6), -0.6);
    CHECK((back - v0).norm() <= 1e-8);
    CHECK(std::abs(flow_jacobian_determinant(bm.model, v0, 0.5) - 1.0) <= 1e-5);
  }

  TEST_CASE("field is the symplectic gradient") {
    const auto bm = builtin_model("harmonic");
    const PhaseVector f = hamiltonian_field(bm.model, point(0.5, 2.0));
    CHECK(f(0) == doctest::Approx(4.0));
    CHECK(f(1) == doctest::Approx(-1.0));
  }

  TEST_CASE("harmonic displacement bounds hold with the exact lower ratio") {
    const auto bm = builtin_model("harmonic");
    std::vector<double> t_grid;
    for (int i = -10; i <= 10; ++i) t_grid.push_back(0.1 * i);
    DisplacementOptions o;
    o.samples = 40;
    const auto r = check_displacement_bounds(bm.model, bm.model, bm.box, t_grid, 2.0, 0.41, 0.01, o);
    CHECK(r.samples == 40);
    CHECK(r.lower_violations == 0);
    CHECK(r.upper_violations == 0);
    CHECK(r.taylor_violations == 0);
    // |theta_t v - v| / |t grad p| = |sin t| / |t| for the rotation.
    CHECK(r.min_lower_ratio == doctest::Approx(std::sin(1.0)).epsilon(1e-6));
    CHECK(r.max_group_defect <= 1e-8);
    CHECK(r.max_jacobian_defect <= 1e-5);
  }
}
