// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/harness.hpp"

using namespace weylab;

namespace {

SweepSettings harmonic_settings() {
  SweepSettings s;
  s.h_grid = {0.1, 0.07, 0.05, 0.035, 0.025};
  s.weyl_budget = std::size_t{1} << 16;
  s.shell_budget = std::size_t{1} << 14;
  s.critical_seeds = 200;
  return s;
}

long long harmonic_count(double h, double e) {
  long long n = 0;
  while (h * (2 * n + 1) < e) ++n;
  return n;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("h grids") {
    const auto g = geometric_h_grid(0.1, 2.0, 4);
    REQUIRE(g.size() == 4);
    CHECK(g[3] == doctest::Approx(0.0125));
    const auto l = log_spaced_grid(1e-1, 1e-4, 4);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == doctest::Approx(1e-1));
    CHECK(l[1] == doctest::Approx(1e-2));
    CHECK(l[3] == doctest::Approx(1e-4));
  }

  TEST_CASE("exponent fit recovers exact power laws") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125, 0.00625};
    std::vector<double> v, c;
    for (double x : h) {
      v.push_back(3.0 * std::pow(x, -1.5));
      c.push_back(2.0);
    }
    const auto f = fit_exponent(h, v, "power");
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.n_points == 5);
    CHECK(f.ci_half_width <= 1e-9);
    const auto k = fit_exponent(h, c, "constant");
    CHECK(std::abs(k.slope) <= 1e-13);
  }

  TEST_CASE("exact normal equations agree with floating least squares") {
    const std::vector<double> h{0.2, 0.1, 0.07, 0.03, 0.011};
    const std::vector<double> v{1.3, 2.9, 3.7, 9.1, 22.0};
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(v[i]));
    }
    const auto ols = least_squares(lx, ly);
    const auto f = fit_exponent(h, v, "q");
    CHECK(f.slope == doctest::Approx(ols.slope).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(ols.intercept).epsilon(1e-12));
    CHECK(f.slope_stderr == doctest::Approx(ols.slope_stderr));
  }

  TEST_CASE("fits need four positive points") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    CHECK_THROWS_AS(fit_exponent({0.1, 0.05, 0.025}, {1.0, 2.0, 3.0}, "few"), Error);
    try {
      fit_exponent(h, {1.0, -2.0, 3.0, 4.0}, "signed");
      FAIL("expected an incomplete fit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::incomplete);
    }
    const auto f = fit_exponent({0.1, 0.05, 0.025, 0.0125, 0.01}, {1.0, 0.0, 3.0, 4.0, 5.0}, "zero");
    REQUIRE(f.excluded_h.size() == 1);
    CHECK(f.excluded_h[0] == 0.05);
  }

  TEST_CASE("empty grid gives an empty sweep") {
    const auto bm = builtin_model("harmonic");
    auto s = harmonic_settings();
    s.h_grid.clear();
    const auto r = run_h_sweep(bm.model, bm.box, s);
    CHECK(r.records.empty());
    CHECK(r.completed_h().empty());
  }

  TEST_CASE("harmonic sweep counts, Weyl term and remainder functional") {
    const auto bm = builtin_model("harmonic");
    const auto r = run_h_sweep(bm.model, bm.box, harmonic_settings());
    REQUIRE(r.records.size() == 5);
    CHECK(r.missing_h().empty());
    CHECK_FALSE(r.in_theorem_scope);
    CHECK(r.scope_note.rfind("sanity, outside theorem scope", 0) == 0);
    for (const auto& rec : r.records) {
      REQUIRE(rec.ok);
      CHECK(std::llabs(rec.count_raw - harmonic_count(rec.h, 1.0)) <= 1);
      CHECK(rec.weyl == doctest::Approx(1.0 / (2.0 * rec.h)).epsilon(1e-9));
      CHECK(rec.r_value >= rec.h);
      CHECK(rec.ratio >= 0.0);
      CHECK(rec.count_plus <= rec.count_raw);
      CHECK(rec.count_raw <= rec.count_minus);
      REQUIRE(rec.extra_r.size() == 1);
    }
    const auto f = fit_exponent(r.records, "R", [](const SweepRecord& x) { return x.r_value; });
    CHECK(std::abs(f.slope - 1.0) <= 0.1);
  }

  TEST_CASE("unresolved grid is recorded per h without aborting") {
    const auto bm = builtin_model("harmonic");
    auto s = harmonic_settings();
    s.grid_points = 10;
    const auto r = run_h_sweep(bm.model, bm.box, s);
    REQUIRE(r.records.size() == 5);
    CHECK(r.completed_h().empty());
    CHECK(r.missing_h().size() == 5);
    for (const auto& rec : r.records) {
      CHECK_FALSE(rec.ok);
      CHECK(rec.fault.find("resolution") != std::string::npos);
    }
    CHECK_THROWS_AS(fit_exponent(r.records, "N", [](const SweepRecord& x) { return double(x.count); }),
                    Error);
  }

  TEST_CASE("verdict aggregation and exit status") {
    VerdictDocument doc;
    doc.experiment = "demo";
    CHECK(doc.overall() == Status::partial);
    doc.criteria.push_back(criterion_from_samples("a", "first", {0.1, 0.05}, {}, std::nullopt, true));
    CHECK(doc.overall() == Status::pass);
    CHECK(exit_status(doc) == 0);
    doc.criteria.push_back(criterion_from_samples("b", "second", {0.1}, {0.05}, std::nullopt, true));
    CHECK(doc.criteria.back().status == Status::partial);
    CHECK(doc.overall() == Status::partial);
    CHECK(exit_status(doc) == 1);
    doc.criteria.push_back(criterion_from_samples("c", "third", {0.1}, {}, 0.1, false));
    CHECK(doc.overall() == Status::fail);
    const auto j = doc.to_json();
    CHECK(j["schema_version"] == kVerdictSchemaVersion);
    CHECK(j["status"] == "FAIL");
    CHECK(j["exit_status"] == 1);
    CHECK(j["criteria"][0]["witness_h"].is_null());
    CHECK(j["criteria"][2]["witness_h"] == 0.1);
    CHECK(j["criteria"][1]["missing_h"][0] == 0.05);
  }

  TEST_CASE("sweep tables are byte-identical across runs") {
    const auto bm = builtin_model("harmonic");
    auto s = harmonic_settings();
    s.h_grid = {0.1, 0.05};
    const auto a = run_h_sweep(bm.model, bm.box, s);
    const auto b = run_h_sweep(bm.model, bm.box, s);
    CHECK(sweep_csv(a) == sweep_csv(b));
    CHECK(volume_csv(a) == volume_csv(b));
    CHECK(sweep_csv(a).rfind("h,E,N,N_raw,N_plus,N_minus,unknowns,", 0) == 0);
    CHECK(csv_number(0.1) == "0.1");
  }
}
