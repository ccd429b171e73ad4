#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "phgrasp/scenario.hpp"

using namespace phgrasp;

#ifndef PHGRASP_PRESETS_DIR
#define PHGRASP_PRESETS_DIR "presets"
#endif

namespace {

std::string preset_path(const std::string& name) {
    return std::string(PHGRASP_PRESETS_DIR) + "/" + name + ".json";
}

}  // namespace

TEST_CASE("bundled preset files load and match the built-in presets") {
    for (const std::string& name : preset_names()) {
        const Scenario from_file = load_scenario(preset_path(name));
        const Scenario built_in = preset_scenario(name);
        CHECK(from_file.name == name);
        // Identical canonical JSON means identical scenarios.
        CHECK(scenario_to_json_string(from_file) ==
              scenario_to_json_string(built_in));
    }
}

TEST_CASE("rigid_restlength preset: q_f = 0.20 from f_d and K_p") {
    const Scenario sc = load_scenario(preset_path("rigid_restlength"));
    CHECK(sc.q_f() == doctest::Approx(0.20));
    CHECK(sc.f_d == doctest::Approx(0.20));
    CHECK(sc.rest_length.K_p == doctest::Approx(1.0));
    CHECK(sc.rest_length.K_rl == doctest::Approx(0.5));
    CHECK(sc.rest_length.C == doctest::Approx(3.0));
    CHECK(sc.integrator.dt == doctest::Approx(0.001));
    CHECK(sc.integrator.t_end == doctest::Approx(3.0));
}

TEST_CASE("compliant presets use the softer gains and longer horizon") {
    const Scenario sc = preset_scenario("compliant_restlength");
    CHECK(sc.rest_length.K_rl == doctest::Approx(0.25));
    CHECK(sc.rest_length.C == doctest::Approx(1.5));
    CHECK(sc.integrator.t_end == doctest::Approx(4.0));
    CHECK(sc.compliant.m_c == doctest::Approx(0.1));
}

TEST_CASE("round-trip save/load identity") {
    const Scenario sc = preset_scenario("compliant_hogan_fe");
    const std::string path = "roundtrip_scenario.json";
    save_scenario(sc, path);
    const Scenario back = load_scenario(path);
    CHECK(scenario_to_json_string(back) == scenario_to_json_string(sc));
    std::remove(path.c_str());
}

TEST_CASE("empty file is rejected") {
    const std::string path = "empty_scenario.json";
    std::ofstream(path).close();
    CHECK_THROWS_AS(load_scenario(path), ContractViolation);
    std::remove(path.c_str());
}

TEST_CASE("unknown keys are rejected with the field path") {
    const std::string text = R"({
      "object": {"type": "rigid"},
      "controller": {"type": "rest_length", "K_q": 1.0}
    })";
    CHECK_THROWS_WITH_AS(static_cast<void>(scenario_from_json_string(text)),
                         "scenario: unknown key 'controller.K_q'", ContractViolation);
}

TEST_CASE("invalid configurations are rejected") {
    SUBCASE("dt = 0") {
        std::string text = R"({
          "object": {"type": "rigid"},
          "controller": {"type": "rest_length"},
          "integrator": {"method": "rk4", "dt": 0.0, "t_end": 1.0}
        })";
        CHECK_THROWS_AS(static_cast<void>(scenario_from_json_string(text)),
                        ContractViolation);
    }
    SUBCASE("dt too large for rk4") {
        std::string text = R"({
          "object": {"type": "rigid"},
          "controller": {"type": "rest_length"},
          "integrator": {"method": "rk4", "dt": 0.01, "t_end": 1.0}
        })";
        CHECK_THROWS_AS(static_cast<void>(scenario_from_json_string(text)),
                        ContractViolation);
    }
    SUBCASE("q_f inconsistent with f_d via K_p") {
        std::string text = R"({
          "object": {"type": "rigid"},
          "controller": {"type": "rest_length", "K_p": 1.0},
          "f_d": 0.2,
          "q_f": 0.35
        })";
        CHECK_THROWS_AS(static_cast<void>(scenario_from_json_string(text)),
                        ContractViolation);
    }
    SUBCASE("bad controller type") {
        std::string text = R"({
          "object": {"type": "rigid"},
          "controller": {"type": "pid"}
        })";
        CHECK_THROWS_AS(static_cast<void>(scenario_from_json_string(text)),
                        ContractViolation);
    }
    SUBCASE("missing object section") {
        CHECK_THROWS_AS(static_cast<void>(scenario_from_json_string(
                            R"({"controller": {"type": "hogan"}})")),
                        ContractViolation);
    }
}

TEST_CASE("Hogan scenarios mirror K_Hp so q_f stays consistent") {
    const Scenario sc = preset_scenario("rigid_hogan");
    CHECK(sc.q_f() == doctest::Approx(0.2));
    CHECK_NOTHROW(sc.validate());
}
