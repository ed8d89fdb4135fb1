#include "doctest.h"
#include "helpers.hpp"

#include <chirpmix/config.hpp>

#include <cmath>
#include <functional>
#include <string>

using namespace chirpmix;
using testutil::kPi;

#ifndef CONFIGS_DIR
#define CONFIGS_DIR "configs"
#endif

namespace {

const char* kMinimal = "[spins]\nJ_hz = 33.0\n";

std::string msg_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parser handles tables, arrays, booleans and comments") {
    const char* text =
        "# top comment\n"
        "title = \"run A\"  # trailing comment\n"
        "\n"
        "[alpha]\n"
        "x = 1.5\n"
        "flag = true\n"
        "names = [\"a\", \"b,c\"]\n"
        "\n"
        "[[block]]\n"
        "v = 1\n"
        "[[block]]\n"
        "v = 2\n";
    ParsedConfig cfg = parse_config_text(text, "inline");
    CHECK(cfg.root.at("title").str == "run A");
    CHECK(cfg.tables.at("alpha").at("x").number == doctest::Approx(1.5));
    CHECK(cfg.tables.at("alpha").at("flag").boolean == true);
    REQUIRE(cfg.tables.at("alpha").at("names").list.size() == 2);
    // commas inside quotes must not split the array
    CHECK(cfg.tables.at("alpha").at("names").list[1] == "b,c");
    REQUIRE(cfg.table_arrays.at("block").size() == 2);
    CHECK(cfg.table_arrays.at("block")[1].at("v").number == doctest::Approx(2.0));
    CHECK(cfg.tables.at("alpha").at("x").line == 5);
}

TEST_CASE("parse errors carry file and line") {
    CHECK_THROWS_AS(parse_config_text("x 1\n", "f"), ConfigError);
    std::string m = msg_of([] { parse_config_text("\n\nkey value\n", "f"); });
    CHECK(m.find("f:3") != std::string::npos);

    m = msg_of([] { parse_config_text("s = \"open\n", "f"); });
    CHECK(m.find("f:1") != std::string::npos);

    m = msg_of([] { parse_config_text("[t\nx = 1\n", "f"); });
    CHECK(m.find("f:1") != std::string::npos);

    m = msg_of([] { parse_config_text("a = [1, 2\n", "f"); });
    CHECK(m.find("f:1") != std::string::npos);

    m = msg_of([] { parse_config_text("a = 1\na = 2\n", "f"); });
    CHECK(m.find("f:2") != std::string::npos);
    CHECK(m.find("duplicate") != std::string::npos);
}

TEST_CASE("unknown keys and tables are rejected with locations") {
    ParsedConfig cfg = parse_config_text(
        "[spins]\nJ_hz = 33\n[chirp]\nbogus = 1\n", "bad.toml");
    std::string m = msg_of([&] { load_experiment(cfg); });
    CHECK(m.find("bogus") != std::string::npos);
    CHECK(m.find("bad.toml:4") != std::string::npos);

    ParsedConfig cfg2 = parse_config_text(
        "[spins]\nJ_hz = 33\n[mystery]\nx = 1\n", "bad2.toml");
    std::string m2 = msg_of([&] { load_experiment(cfg2); });
    CHECK(m2.find("mystery") != std::string::npos);
}

TEST_CASE("the coupling constant is required") {
    ParsedConfig cfg = parse_config_text("[chirp]\nA_khz = 30\n", "nojay.toml");
    std::string m = msg_of([&] { load_experiment(cfg); });
    CHECK(m.find("spins.J_hz") != std::string::npos);
}

TEST_CASE("defaults survive a minimal config") {
    ParsedConfig cfg = parse_config_text(kMinimal, "min.toml");
    ExperimentConfig e = load_experiment(cfg);
    CHECK(e.J_hz == doctest::Approx(33.0));
    CHECK(e.A_khz == doctest::Approx(30.0));
    CHECK(e.omega1_khz == doctest::Approx(10.0));
    CHECK(e.omega1_sq_over == doctest::Approx(16.0));
    CHECK(e.dwell_us == doctest::Approx(0.5));
    CHECK(e.n_supercycles == 20);
    CHECK(e.grid == 41);
    CHECK(e.type == "chirp");
    CHECK_FALSE(e.hash.empty());
}

TEST_CASE("unit conversions reach the physics layer correctly") {
    ParsedConfig cfg = parse_config_text(kMinimal, "min.toml");
    ExperimentConfig e = load_experiment(cfg);
    ChirpParams p = e.chirp_params();
    CHECK(p.A == doctest::Approx(2 * kPi * 30e3).epsilon(1e-12));
    CHECK(p.omega1 == doctest::Approx(2 * kPi * 10e3).epsilon(1e-12));
    CHECK(p.a == doctest::Approx(p.omega1 * p.omega1 / 16.0).epsilon(1e-12));
    CHECK(p.T() == doctest::Approx(1.52788745368e-3).epsilon(1e-9));
    SpinSystem sys = e.spin_system();
    CHECK(sys.omega_I == doctest::Approx(2 * kPi * (-5e3)).epsilon(1e-12));
    CHECK(sys.omega_S == doctest::Approx(2 * kPi * 20e3).epsilon(1e-12));
    CHECK(sys.J == doctest::Approx(33.0));
}

TEST_CASE("overrides reuse the file grammar") {
    ParsedConfig cfg = parse_config_text(kMinimal, "min.toml");
    apply_override(cfg, "chirp.dwell_us=0.25");
    apply_override(cfg, "sequence.type=composite");
    ExperimentConfig e = load_experiment(cfg);
    CHECK(e.dwell_us == doctest::Approx(0.25));
    CHECK(e.type == "composite");

    // undotted overrides land in the root table
    apply_override(cfg, "root_note=\"hello\"");
    CHECK(cfg.root.at("root_note").str == "hello");

    CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
}

TEST_CASE("config hash ignores order but tracks values") {
    ParsedConfig a = parse_config_text("[spins]\nJ_hz = 33\nnu_I_khz = -5\n", "a");
    ParsedConfig b = parse_config_text("[spins]\nnu_I_khz = -5\nJ_hz = 33\n", "b");
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    CHECK(config_hash_hex(a).size() == 16);

    ParsedConfig c = parse_config_text("[spins]\nJ_hz = 34\nnu_I_khz = -5\n", "c");
    CHECK(config_hash_hex(a) != config_hash_hex(c));
}

TEST_CASE("buildup pairs parse from quoted offset pairs") {
    ParsedConfig cfg = parse_config_text(
        "[spins]\nJ_hz = 33\n[buildup]\npairs_khz = [\"-5,10\", \"2.5,7\"]\n",
        "pairs.toml");
    ExperimentConfig e = load_experiment(cfg);
    REQUIRE(e.pairs_khz.size() == 2);
    CHECK(e.pairs_khz[0].first == doctest::Approx(-5.0));
    CHECK(e.pairs_khz[0].second == doctest::Approx(10.0));
    CHECK(e.pairs_khz[1].first == doctest::Approx(2.5));

    ParsedConfig bad = parse_config_text(
        "[spins]\nJ_hz = 33\n[buildup]\npairs_khz = [\"5\"]\n", "badpairs.toml");
    CHECK_THROWS_AS(load_experiment(bad), ConfigError);
}

TEST_CASE("physical positivity is enforced at load time") {
    for (const char* line : {"[chirp]\nomega1_khz = 0\n", "[chirp]\ndwell_us = -1\n",
                             "[schedule]\nn_supercycles = -3\n",
                             "[sequence]\ntype = \"laser\"\n"}) {
        std::string text = std::string("[spins]\nJ_hz = 33\n") + line;
        ParsedConfig cfg = parse_config_text(text, "bad.toml");
        CHECK_THROWS_AS(load_experiment(cfg), ConfigError);
    }
}

TEST_CASE("shipped experiment file loads with its stated values") {
    ExperimentConfig e =
        load_experiment(parse_config_file(std::string(CONFIGS_DIR) + "/section31.toml"));
    CHECK(e.J_hz == doctest::Approx(33.0));
    CHECK(e.nu_I_khz == doctest::Approx(-5.0));
    CHECK(e.nu_S_khz == doctest::Approx(20.0));
    CHECK(e.n_supercycles == 20);
    CHECK(e.grid == 41);
    CHECK(e.budget_over_J == doctest::Approx(10.0));
    REQUIRE(e.pairs_khz.size() == 4);
}

TEST_CASE("composite table builds the published cycle") {
    CompositeTable tab =
        load_composite_table(std::string(CONFIGS_DIR) + "/dipsi2.toml");
    CHECK(tab.name == "DIPSI-2");
    CHECK(tab.dwell_us == doctest::Approx(0.25));
    REQUIRE(tab.base.size() == 9);
    REQUIRE(tab.cycle.size() == 4);
    CHECK(tab.cycle[0] == "R");
    CHECK(tab.cycle[1] == "Rbar");

    const double omega1 = 2 * kPi * 10e3;
    // base flip sum 2590 deg at 10 kHz: 719.44 us, cycle 4x that
    PulseWaveform base = composite_sequence(tab.base, omega1, tab.dwell_us * 1e-6);
    CHECK(base.duration() == doctest::Approx(2590.0 / 360.0 / 1e4).epsilon(1e-3));
    PulseWaveform cycle = build_composite_cycle(tab, omega1);
    CHECK(cycle.duration() == doctest::Approx(4 * base.duration()).epsilon(1e-3));

    // Rbar segments are the base run with a pi offset
    const std::size_t n = base.size();
    CHECK(cycle.phase_at(n) - base.phase_at(0) == doctest::Approx(kPi).epsilon(1e-12));

    CompositeTable badcycle = tab;
    badcycle.cycle = {"R", "Q"};
    CHECK_THROWS_AS(build_composite_cycle(badcycle, omega1), ConfigError);
}

}  // TEST_SUITE
