#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "vehfog/error.hpp"
#include "vehfog/scenario.hpp"
#include "vehfog/sweep.hpp"

using namespace vehfog;

namespace {
const std::filesystem::path kConfigs = VEHFOG_CONFIG_DIR;

bool mentions(const std::exception& e, const std::string& what) {
    return std::string(e.what()).find(what) != std::string::npos;
}
}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults") {
        const Scenario s = parse_scenario("");
        CHECK(s.radio.range_m == 300.0);
        CHECK(s.mac.data_rate_bps == 2e6);
        CHECK(s.msg_size == 256);
        CHECK(s.mac.cw_min == 31);
        CHECK(s.mac.cw_max == 1023);
        CHECK(s.road.length == 10000.0);
        CHECK_NOTHROW(validate(s));
    }
    SUBCASE("units convert to SI") {
        const Scenario s = parse_scenario("mac.slot_us = 20\ncloud.rtt_ms = 80 # comment\nprotocol = flooding\n");
        CHECK(s.mac.slot_s == doctest::Approx(20e-6));
        CHECK(s.cloud.rtt_s == doctest::Approx(0.08));
        CHECK(s.protocol == ProtocolKind::flooding);
    }
    SUBCASE("errors name the key") {
        try {
            parse_scenario("radio.range_m = 300\nradio.rnage_m = 200\n");
            FAIL("unknown key accepted");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "radio.rnage_m"));
            CHECK(mentions(e, "line 2"));
        }
        try {
            parse_scenario("mac.cw_min = many\n");
            FAIL("bad value accepted");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "mac.cw_min"));
        }
        try {
            parse_scenario("sim.seed = 1\nsim.seed = 2\n");
            FAIL("duplicate accepted");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "sim.seed"));
        }
        try {
            validate(parse_scenario("radio.range_m = -5\n"));
            FAIL("negative range accepted");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "radio.range_m"));
        }
        CHECK_THROWS_AS(parse_scenario("protocol = gossip\n"), ConfigError);
        CHECK_THROWS_AS(parse_scenario("no equals sign\n"), ConfigError);
    }
    SUBCASE("trace file excludes the generator") {
        const Scenario s = parse_scenario("trace.file = minimal_trace.csv\ntraffic.vehicles = 10\n", kConfigs);
        try {
            validate(s);
            FAIL("both trace sources accepted");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "traffic.vehicles"));
        }
        CHECK_THROWS_AS(validate(parse_scenario("trace.file = missing.csv\n", kConfigs)), ConfigError);
        CHECK_THROWS_AS(validate(parse_scenario("map.file = missing.map\n", kConfigs)), ConfigError);
    }
    SUBCASE("dump parses back to the same configuration") {
        Scenario s = load_scenario(kConfigs / "manhattan.cfg");
        const std::string dumped = dump_scenario(s);
        Scenario back = parse_scenario(dumped, kConfigs);
        CHECK(dump_scenario(back) == dumped);
    }
    SUBCASE("help lists every key with a unit") {
        const std::string help = config_help();
        for (const auto& k : config_keys()) {
            CHECK(help.find(std::string(k.name)) != std::string::npos);
            CHECK_FALSE(k.unit.empty());
        }
    }
}

TEST_CASE("message schedules") {
    const auto tr = generate_trace({}, {}, 1);
    const auto a = generate_messages(tr, 0.1, 1.0, 0.1, 256, 7);
    CHECK(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == i);
        CHECK(a[i].created_at >= 1.0);
        CHECK(a[i].created_at <= 1.1);
        if (i) CHECK(a[i - 1].created_at <= a[i].created_at);
    }
    std::set<VehicleId> senders;
    for (const auto& m : a) senders.insert(m.origin);
    CHECK(senders.size() == a.size());
    CHECK(generate_messages(tr, 0.001, 1.0, 0.1, 256, 7).size() == 1);

    const auto s = parse_schedule("3@0.5 1@0.25,2@0.75", 256);
    REQUIRE(s.size() == 3);
    CHECK(s[0].origin == 1);
    CHECK(s[2].created_at == 0.75);
    CHECK_THROWS_AS(parse_schedule("3@", 256), ConfigError);
    CHECK_THROWS_AS(parse_schedule("x@1", 256), ConfigError);
}

TEST_CASE("bundled configs load and run") {
    SUBCASE("minimal") {
        const auto r = run_scenario(load_scenario(kConfigs / "minimal.cfg"));
        CHECK(r.n_vehicles == 2);
        CHECK(r.report.delivery_probability == 1.0);
    }
    SUBCASE("evaluation defaults need no overrides") {
        const Scenario s = load_scenario(kConfigs / "defaults.cfg");
        CHECK(dump_scenario(s) == dump_scenario(Scenario{}));
        CHECK_NOTHROW(run_scenario(s));
    }
}

TEST_CASE("sweeps") {
    Scenario base = load_scenario(kConfigs / "manhattan.cfg");
    SweepSpec one;
    one.densities = {50};
    one.seeds = {3};
    one.protocols = {ProtocolKind::hybrid_vehfog};
    const auto sw = run_sweep(base, one);
    REQUIRE(sw.rows.size() == 1);
    Scenario single = base;
    apply_override(single, "traffic.vehicles", "50");
    apply_override(single, "sim.seed", "3");
    const auto run = run_scenario(single);
    CHECK(results_csv(sw.rows) == results_csv(std::vector<ResultRow>{{ProtocolKind::hybrid_vehfog, 50, 3, run.report}}));

    SweepSpec grid;
    grid.densities = {50, 100};
    grid.seeds = {1, 2};
    grid.jobs = 1;
    const auto serial = run_sweep(base, grid);
    CHECK(serial.rows.size() == 2 * 2 * 5);
    CHECK(serial.errors.empty());
    grid.jobs = 3;
    std::reverse(grid.protocols.begin(), grid.protocols.end());
    std::reverse(grid.seeds.begin(), grid.seeds.end());
    CHECK(results_csv(run_sweep(base, grid).rows) == results_csv(serial.rows));

    CHECK(SweepSpec{}.densities.size() * SweepSpec{}.seeds.size() * SweepSpec{}.protocols.size() == 300);
    CHECK(parse_int_list("50:300:50") == std::vector<int>{50, 100, 150, 200, 250, 300});
    CHECK(parse_int_list("7, 9") == std::vector<int>{7, 9});
    CHECK_THROWS_AS(parse_int_list("1:2"), ConfigError);
    CHECK_THROWS_AS(run_sweep(load_scenario(kConfigs / "minimal.cfg"), one), ConfigError);
}
