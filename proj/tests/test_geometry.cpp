#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "vehfog/error.hpp"
#include "vehfog/geometry.hpp"

using namespace vehfog;

TEST_CASE("map loading") {
    SUBCASE("bounds only") {
        const auto m = load_map("bounds 0 0 10000 100\n");
        CHECK(m.buildings().empty());
        CHECK(m.bounds() == Rect{0, 0, 10000, 100});
    }
    SUBCASE("one building") {
        const auto m = load_map("# demo\nbounds 0 0 10000 100\n100 0 120 40\n");
        REQUIRE(m.buildings().size() == 1);
        CHECK(m.buildings()[0].area() == doctest::Approx(800.0));
    }
    SUBCASE("overlap names both lines") {
        try {
            load_map("bounds 0 0 200 200\n0 0 60 60\n40 40 100 100\n");
            FAIL("expected overlap error");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("line 3") != std::string::npos);
            CHECK(what.find("overlap") != std::string::npos);
            CHECK(what.find("line 2") != std::string::npos);
        }
    }
    SUBCASE("malformed lines") {
        CHECK_THROWS_AS(load_map("bounds 0 0 10 10\n1 2 3\n"), ParseError);
        CHECK_THROWS_AS(load_map("1 2 3 4\n"), ParseError);
        CHECK_THROWS_AS(load_map("bounds 0 0 10 10\n1 1 x 4\n"), ParseError);
        CHECK_THROWS_AS(load_map("bounds 0 0 10 10\n5 5 5 8\n"), ValidationError);
        CHECK_THROWS_AS(load_map("bounds 0 0 10 10\n5 5 12 8\n"), ValidationError);
    }
    SUBCASE("touching walls are not an overlap") {
        CHECK_NOTHROW(load_map("bounds 0 0 200 200\n0 0 50 50\n50 0 100 50\n"));
    }
    SUBCASE("write/load round trip") {
        const auto m = manhattan_grid({});
        CHECK(load_map(write_map(m)).buildings() == m.buildings());
    }
}

TEST_CASE("segment obstruction examples") {
    const auto m = load_map("bounds 0 0 200 100\n100 0 120 40\n");
    const Rect b{100, 0, 120, 40};

    auto o = los_obstruction(m, {0, 50}, {90, 50});
    CHECK(o.n == 0);
    CHECK(o.l_obs == 0.0);

    o = los_obstruction(m, {90, 20}, {130, 20});
    CHECK(o.n == 2);
    CHECK(o.l_obs == doctest::Approx(20.0));
    const auto through = oracle::sample_obstruction({b}, {90, 20}, {130, 20});
    CHECK(through.n == 2);
    CHECK(through.l_obs == doctest::Approx(20.0).epsilon(1e-4));

    o = los_obstruction(m, {90, 20}, {110, 20});
    CHECK(o.n == 1);
    CHECK(o.l_obs == doctest::Approx(10.0));
    const auto ending = oracle::sample_obstruction({b}, {90, 20}, {110, 20});
    CHECK(ending.n == 1);
    CHECK(ending.l_obs == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("segment obstruction edge cases") {
    const Rect b{100, 0, 120, 40};
    SUBCASE("sliding along a wall is not a crossing") {
        const auto o = segment_rect_obstruction(b, {90, 40}, {130, 40});
        CHECK(o.n == 0);
        CHECK(o.l_obs == 0.0);
    }
    SUBCASE("touching a corner is not a crossing") {
        const auto o = segment_rect_obstruction(b, {90, 30}, {110, 50});  // passes through (100,40)
        CHECK(o.n == 0);
    }
    SUBCASE("entering through a corner counts once") {
        const auto o = segment_rect_obstruction(b, {90, -10}, {110, 10});  // corner (100,0), ends inside
        CHECK(o.n == 1);
        CHECK(o.l_obs == doctest::Approx(std::hypot(10.0, 10.0)));
    }
    SUBCASE("fully inside") {
        const auto o = segment_rect_obstruction(b, {105, 10}, {115, 30});
        CHECK(o.n == 0);
        CHECK(o.l_obs == doctest::Approx(std::hypot(10.0, 20.0)));
    }
    SUBCASE("starting on a wall going in") {
        const auto o = segment_rect_obstruction(b, {100, 20}, {110, 20});
        CHECK(o.n == 1);
        CHECK(o.l_obs == doctest::Approx(10.0));
    }
    SUBCASE("zero-length segment") {
        const auto o = segment_rect_obstruction(b, {105, 10}, {105, 10});
        CHECK(o.n == 0);
        CHECK(o.l_obs == 0.0);
    }
    SUBCASE("shared wall counts for both buildings") {
        const auto m = load_map("bounds 0 0 300 100\n100 0 120 40\n120 0 140 40\n");
        const auto o = los_obstruction(m, {90, 20}, {150, 20});
        CHECK(o.n == 4);
        CHECK(o.l_obs == doctest::Approx(40.0));
        const auto s = oracle::sample_obstruction(m.buildings(), {90, 20}, {150, 20});
        CHECK(s.n == 4);
    }
}

TEST_CASE("region areas") {
    const double pi = std::numbers::pi;
    auto a = region_areas(300, 0);
    CHECK(a.t_base == doctest::Approx(pi * 9e4));
    CHECK(a.r1 == doctest::Approx(a.t_base));
    CHECK(a.r2 == 0.0);
    a = region_areas(300, 300);
    CHECK(a.r1 == doctest::Approx(0.0));
    CHECK(a.r2 == doctest::Approx(a.t_base));
    a = region_areas(300, 150);
    CHECK(a.r2 == doctest::Approx(70685.8).epsilon(1e-6));
    CHECK(a.r1 + a.r2 == doctest::Approx(a.t_base));
    CHECK_THROWS_AS(region_areas(300, 301), DomainError);
    CHECK_THROWS_AS(region_areas(-1, 0), DomainError);
}

TEST_CASE("manhattan grid") {
    const auto m = manhattan_grid({});
    CHECK(m.buildings().size() == 9);
    for (const Rect& r : m.buildings()) {
        CHECK(r.width() == doctest::Approx(80.0));
        CHECK(r.height() == doctest::Approx(80.0));
    }
    CHECK(m.bounds() == Rect{0, 0, 320, 320});
    GridSpec inset{};
    inset.inset = 5;
    CHECK(manhattan_grid(inset).buildings()[0].width() == doctest::Approx(70.0));
}

TEST_CASE("property: obstruction matches the sampling oracle on random maps") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 500.0), uy(0.0, 300.0);
    std::uniform_int_distribution<int> count(1, 4);
    for (int c = 0; c < 150; ++c) {
        const auto b = test::random_buildings(rng, count(rng), 500, 300);
        const ObstacleMap m({0, 0, 500, 300}, b);
        const Point p1{ux(rng), uy(rng)}, p2{ux(rng), uy(rng)};
        const auto got = los_obstruction(m, p1, p2);
        const auto want = oracle::sample_obstruction(b, p1, p2, 20000);
        const double len = distance(p1, p2);
        CHECK(got.n == want.n);
        CHECK(std::abs(got.l_obs - want.l_obs) <= 2.0 * len / 20000 * static_cast<double>(b.size()));
    }
}

TEST_CASE("property: obstruction is symmetric and additive") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 500.0), uy(0.0, 300.0), ut(0.05, 0.95);
    for (int c = 0; c < 300; ++c) {
        const auto b = test::random_buildings(rng, 3, 500, 300);
        const ObstacleMap m({0, 0, 500, 300}, b);
        const Point p1{ux(rng), uy(rng)}, p2{ux(rng), uy(rng)};
        const auto fwd = los_obstruction(m, p1, p2);
        const auto back = los_obstruction(m, p2, p1);
        CHECK(fwd.n == back.n);
        CHECK(fwd.l_obs == doctest::Approx(back.l_obs).epsilon(1e-9));

        // Split at a point outside every building: both measures add up.
        const double t = ut(rng);
        const Point mid{p1.x + (p2.x - p1.x) * t, p1.y + (p2.y - p1.y) * t};
        bool clear = true;
        for (const Rect& r : b) clear &= !r.contains(mid);
        if (!clear) continue;
        const auto a1 = los_obstruction(m, p1, mid);
        const auto a2 = los_obstruction(m, mid, p2);
        CHECK(a1.n + a2.n == fwd.n);
        CHECK(a1.l_obs + a2.l_obs == doctest::Approx(fwd.l_obs).epsilon(1e-9));
    }
}
