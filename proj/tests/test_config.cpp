#include "doctest.h"
#include "tcltb/config.hpp"

using namespace tcltb;

TEST_CASE("a representative config parses into the experiment structure") {
    const std::string text = R"(
# 20-house fixed setpoint run
scenario = fixed_setpoint
fleet.n_houses = 20
fleet.seed = 42
fleet.jitter.q_fixed = 0.05
fleet.jitter.thirty_gal_fraction = 0.5

house.setpoint_c = 23.0
house.deadband_c = 1.0
house.lockout_s = 180
house.q_fixed = 125

schedule.kind = constant
schedule.base_w = 250

ambient.t_c = 25.0
run.duration_s = 7200
run.warmup_cycles = 3
run.output_dir = out/fixed
integrator.dt_s = 0.1
)";
    const auto cfg = experiment_config_from_text(text, "test.cfg");
    CHECK(cfg.scenario == Scenario::FixedSetpoint);
    CHECK(cfg.fleet.n_houses == 20);
    CHECK(cfg.fleet.rng_seed == 42);
    CHECK(cfg.fleet.jitter.q_fixed == doctest::Approx(0.05));
    CHECK(cfg.fleet.jitter.thirty_gal_fraction == doctest::Approx(0.5));
    CHECK(cfg.fleet.base.setpoint == doctest::Approx(23.0));
    CHECK(cfg.fleet.schedules.at(0).base_w == doctest::Approx(250.0));
    CHECK(cfg.fleet.ambient.constant_c == doctest::Approx(25.0));
    CHECK(cfg.duration_s == doctest::Approx(7200.0));
    CHECK(cfg.output_dir == "out/fixed");
}

TEST_CASE("lists, pairs and profiles parse") {
    const std::string text = R"(
scenario = heat_sweep
sweep.q_w = 0, 75, 175, 275
schedule.kind = profile
schedule.profile = 0:100, 3600:200
ambient.profile = 0:20, 7200:32
run.duration_s = 7200
)";
    const auto cfg = experiment_config_from_text(text, "sweep.cfg");
    CHECK(cfg.sweep_q_w == std::vector<double>{0.0, 75.0, 175.0, 275.0});
    REQUIRE(cfg.fleet.schedules.at(0).profile.size() == 2);
    CHECK(cfg.fleet.schedules.at(0).profile[1].second == doctest::Approx(200.0));
    REQUIRE(cfg.fleet.ambient.profile.size() == 2);
    CHECK(cfg.fleet.ambient.profile[1].first == doctest::Approx(7200.0));
}

TEST_CASE("duration not exceeding the warm-up is a config error") {
    const std::string text = R"(
scenario = fixed_setpoint
run.duration_s = 600
run.warmup_s = 600
)";
    CHECK_THROWS_AS(experiment_config_from_text(text, "bad.cfg"), ConfigError);
    try {
        experiment_config_from_text(text, "bad.cfg");
    } catch (const ConfigError& e) {
        CHECK(e.line == 4);  // the warmup_s line
        CHECK(std::string(e.what()).find("bad.cfg:4") != std::string::npos);
    }
}

TEST_CASE("unknown keys fail with the offending line") {
    const std::string text = "scenario = fixed_setpoint\nhouse.typo_field = 3\n";
    try {
        experiment_config_from_text(text, "x.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("house.typo_field") != std::string::npos);
    }
}

TEST_CASE("malformed values fail with the offending line") {
    try {
        experiment_config_from_text("fleet.n_houses = twenty\n", "y.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 1);
        CHECK(std::string(e.what()).find("integer") != std::string::npos);
    }
    CHECK_THROWS_AS(experiment_config_from_text("scenario == x\n", "z.cfg"), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_text("just some text\n", "z.cfg"), ConfigError);
    CHECK_THROWS_AS(
        experiment_config_from_text("run.duration_s = 1\nrun.duration_s = 2\n", "d.cfg"),
        ConfigError);
}

TEST_CASE("semantic invariants are enforced") {
    CHECK_THROWS_AS(
        experiment_config_from_text("fleet.n_houses = 0\n", "v.cfg"), ConfigError);
    CHECK_THROWS_AS(
        experiment_config_from_text("fleet.jitter.u_a = 0.9\n", "v.cfg"), ConfigError);
    CHECK_THROWS_AS(
        experiment_config_from_text("telemetry.power_factor = 1.5\n", "v.cfg"),
        ConfigError);
    CHECK_THROWS_AS(
        experiment_config_from_text("scenario = heat_sweep\n", "v.cfg"),
        ConfigError);  // missing grid
    CHECK_THROWS_AS(
        experiment_config_from_text("scenario = nonsense\n", "v.cfg"), ConfigError);
    CHECK_THROWS_AS(
        experiment_config_from_text("house.deadband_c = 0\n", "v.cfg"), ConfigError);
}

TEST_CASE("defaults stand in for every omitted key") {
    const auto cfg = experiment_config_from_text("scenario = fixed_setpoint\n", "min.cfg");
    CHECK(cfg.fleet.n_houses == 20);
    CHECK(cfg.fleet.base.lockout_s == doctest::Approx(180.0));
    CHECK(cfg.latch_dt_s == doctest::Approx(1.0));
    CHECK(cfg.warmup_cycles == 3);
    CHECK(cfg.integrator.dt_s == doctest::Approx(0.1));
    CHECK(cfg.server.port == 47810);
    CHECK(cfg.telemetry.power_factor == doctest::Approx(0.95));
    CHECK(cfg.inrush.peak_multiplier == doctest::Approx(5.5));
}
