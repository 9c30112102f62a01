// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>

#include "core/config.hpp"
#include "core/error.hpp"

using namespace weylab;

namespace {

std::string config_error(const std::string& text, const std::string& experiment = "") {
  try {
    parse_config(text, experiment);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

std::string with_delta0(const ExperimentConfig& base, double delta0) {
  auto c = base;
  c.delta0 = delta0;
  return emit_config(c);
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("every reference configuration round-trips") {
    for (const auto& name : experiment_names()) {
      CAPTURE(name);
      const auto c = default_config(name);
      CHECK(validate_config(c, name).empty());
      CHECK(parse_config(emit_config(c), name) == c);
    }
  }

  TEST_CASE("perturbed configurations round-trip exactly") {
    auto c = default_config("weyl_sweep");
    c.energy = 1.0 / 3.0;
    c.epsilon = 0.123456789012345678;
    c.seed = 987654321;
    c.h_grid = {0.1 / 7.0, 0.01 / 3.0};
    c.output_dir = "out/run";
    c.variant = OperatorVariant::minus;
    c.samples = 17;
    CHECK(parse_config(emit_config(c)) == c);
  }

  TEST_CASE("smoothing scale bounds depend on the Holder exponent") {
    auto c = default_config("oscillatory_decay");
    REQUIRE(resolve_model(c).model.holder_exponent() == 0.5);
    const auto msg = config_error(with_delta0(c, 0.4));
    CHECK(msg.find("delta0") != std::string::npos);
    CHECK(parse_config(with_delta0(c, 0.41)).delta0 == 0.41);
    CHECK(config_error(with_delta0(c, 0.5)).find("delta0") != std::string::npos);
  }

  TEST_CASE("critical sweeps enforce the critical-energy condition") {
    const auto c = default_config("critical_sweep");
    const auto msg = config_error(with_delta0(c, 0.3), "critical_sweep");
    CHECK(msg.find("critical-energy condition") != std::string::npos);
    CHECK(config_error(with_delta0(c, 0.3), "weyl_sweep").find("critical-energy") ==
          std::string::npos);
  }

  TEST_CASE("an empty document lists every missing key") {
    const auto msg = config_error("");
    for (const auto& k : required_config_keys()) {
      CAPTURE(k);
      CHECK(msg.find(k) != std::string::npos);
    }
    CHECK(required_config_keys().size() == 9);
  }

  TEST_CASE("parameter violations are collected together") {
    auto c = default_config("weyl_sweep");
    c.cbar_upper = 1.0;
    c.epsilon = 1.5;
    const auto msg = config_error(emit_config(c));
    CHECK(msg.find("Cbar") != std::string::npos);
    CHECK(msg.find("epsilon") != std::string::npos);
  }

  TEST_CASE("unknown, duplicate and malformed lines are reported") {
    const std::string base = emit_config(default_config("weyl_sweep"));
    CHECK(config_error(base + "colour = red\n").find("unknown key 'colour'") != std::string::npos);
    CHECK(config_error(base + "seed = 4\n").find("duplicate key 'seed'") != std::string::npos);
    CHECK(config_error(base + "no equals sign\n").find("expected key = value") !=
          std::string::npos);
    CHECK(parse_config(base + "# comment only\n\n") == default_config("weyl_sweep"));
  }

  TEST_CASE("custom potentials define the model") {
    auto c = default_config("mollifier_rates");
    REQUIRE(c.model == "custom");
    const auto m = resolve_model(c);
    CHECK(m.model.dimension() == 1);
    CHECK(m.model.holder_exponent() == 0.5);
    c.x_extent = 2.0;
    CHECK(resolve_model(c).box.x_extent == 2.0);
  }

  TEST_CASE("h grid resolution") {
    auto c = default_config("weyl_sweep");
    CHECK(resolve_h_grid(c) == c.h_grid);
    c.h_grid.clear();
    c.h_max = 0.1;
    c.h_min = 0.001;
    c.h_points = 3;
    const auto g = resolve_h_grid(c);
    REQUIRE(g.size() == 3);
    CHECK(g[1] == doctest::Approx(0.01));
    c.h_min = 0.0;
    c.h_points = 2;
    CHECK(resolve_h_grid(c)[1] == doctest::Approx(0.1 / std::sqrt(2.0)));
  }

  TEST_CASE("unknown experiments are rejected") {
    CHECK_FALSE(is_experiment("nope"));
    try {
      default_config("nope");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::unknown_experiment);
    }
  }
}
