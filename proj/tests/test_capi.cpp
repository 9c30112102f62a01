// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>
#include <vector>

#include "weylab/weylab.h"

namespace {

std::string emit(const weylab_config* c) {
  size_t needed = 0;
  REQUIRE(weylab_config_emit(c, nullptr, 0, &needed) == WEYLAB_OK);
  std::vector<char> buf(needed);
  REQUIRE(weylab_config_emit(c, buf.data(), buf.size(), &needed) == WEYLAB_OK);
  return std::string(buf.data());
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("library information") {
    CHECK(std::string(weylab_version()).size() > 0);
    CHECK(weylab_experiment_count() == 7);
    CHECK(std::string(weylab_experiment_name(0)) == "weyl_sweep");
    CHECK(weylab_experiment_name(100) == nullptr);
    CHECK(std::string(weylab_status_name(WEYLAB_E_CONFIG)) == "config");
  }

  TEST_CASE("errors map to status codes with a message") {
    weylab_config* c = nullptr;
    CHECK(weylab_config_default("nope", &c) == WEYLAB_E_UNKNOWN_EXPERIMENT);
    CHECK(c == nullptr);
    CHECK(std::string(weylab_last_error()).find("nope") != std::string::npos);
    CHECK(weylab_config_parse("model = harmonic\n", nullptr, &c) == WEYLAB_E_CONFIG);
    CHECK(std::string(weylab_last_error()).find("missing required keys") != std::string::npos);
    CHECK(weylab_config_parse(nullptr, nullptr, &c) == WEYLAB_E_INVALID_ARGUMENT);
  }

  TEST_CASE("configuration editing and emission") {
    weylab_config* c = nullptr;
    REQUIRE(weylab_config_default("weyl_sweep", &c) == WEYLAB_OK);
    const std::string text = emit(c);
    CHECK(text.find("model = separable_harmonic_2d") != std::string::npos);
    char small[4];
    size_t needed = 0;
    CHECK(weylab_config_emit(c, small, sizeof small, &needed) == WEYLAB_E_INVALID_ARGUMENT);
    CHECK(needed == text.size() + 1);
    CHECK(weylab_config_set(c, "seed", "42") == WEYLAB_OK);
    CHECK(emit(c).find("seed = 42") != std::string::npos);
    CHECK(weylab_config_set(c, "delta0", "0.2") == WEYLAB_E_CONFIG);
    CHECK(emit(c).find("seed = 42") != std::string::npos);
    weylab_config* copy = nullptr;
    REQUIRE(weylab_config_parse(emit(c).c_str(), "weyl_sweep", &copy) == WEYLAB_OK);
    CHECK(emit(copy) == emit(c));
    weylab_config_free(copy);
    weylab_config_free(c);
  }

  TEST_CASE("running an experiment through the C interface") {
    weylab_config* c = nullptr;
    REQUIRE(weylab_config_default("sublevel_lemma", &c) == WEYLAB_OK);
    weylab_result* r = nullptr;
    CHECK(weylab_run(c, "unknown", &r) == WEYLAB_E_UNKNOWN_EXPERIMENT);
    REQUIRE(weylab_run(c, "sublevel_lemma", &r) == WEYLAB_OK);
    CHECK(weylab_result_exit_status(r) == 0);
    CHECK(std::string(weylab_result_status(r)) == "PASS");
    CHECK(std::string(weylab_result_verdict_json(r)).find("\"schema_version\"") != std::string::npos);
    REQUIRE(weylab_result_file_count(r) >= 1);
    CHECK(std::string(weylab_result_file_name(r, 0)) == "sublevel.csv");
    CHECK(std::string(weylab_result_file_content(r, 0)).size() > 0);
    CHECK(weylab_result_file_name(r, 99) == nullptr);
    weylab_result_free(r);
    weylab_config_free(c);
  }
}
