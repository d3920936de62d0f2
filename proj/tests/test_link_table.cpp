#include <doctest.h>

#include <random>

#include "support.hpp"
#include "vehfog/network.hpp"
#include "vehfog/protocols.hpp"

using namespace vehfog;

TEST_CASE("property: parallel link table equals the serial reference") {
    std::mt19937_64 rng(21);
    for (int c = 0; c < 20; ++c) {
        const auto b = test::random_buildings(rng, 40, 3000, 300);
        const ObstacleMap m({0, 0, 3000, 300}, b);
        std::uniform_real_distribution<double> ux(0, 3000), uy(0, 300);
        std::vector<VehicleState> vs;
        for (VehicleId i = 0; i < 200; ++i) vs.push_back({i, {ux(rng), uy(rng)}, 0, 0});
        vs.push_back({200, vs[0].pos, 0, 0});  // co-located pair
        RadioEnv env;
        env.map = &m;
        const auto fogs = place_fog_nodes(3000, 700, 150, 400, 1e-3);
        const auto par = build_link_table(env, vs, fogs);
        const auto ser = build_link_table_serial(env, vs, fogs);
        CHECK(par.adj == ser.adj);
        CHECK(par.positions == ser.positions);
    }
}

TEST_CASE("link table contents") {
    const auto m = load_map("bounds 0 0 1000 200\n150 20 350 100\n");
    std::vector<VehicleState> vs{{0, {100, 10}, 0, 0}, {1, {250, 10}, 0, 0}, {2, {250, 110}, 0, 0}, {3, {900, 10}, 0, 0}};
    RadioEnv env;
    env.map = &m;
    const std::vector<FogNode> fogs{{0, {200, 150}, 300, 1e-3}, {1, {700, 150}, 300, 1e-3}};
    const auto lt = build_link_table(env, vs, fogs);
    REQUIRE(lt.node_count() == 6);
    CHECK(lt.hearable(0, 1));
    CHECK(lt.find(0, 1)->loc == Loc::clear);
    const Link* shadowed = lt.find(0, 2);
    REQUIRE(shadowed);
    CHECK(shadowed->loc == Loc::shadowed);
    CHECK_FALSE(shadowed->decodable);
    CHECK(lt.find(0, 3) == nullptr);  // 800 m apart
    CHECK(lt.hearable(2, 4));          // fog links ignore buildings
    CHECK(lt.find(0, 5) == nullptr);
    CHECK(lt.hearable(4, 5));  // overlapping fog coverage: carrier sense only
    for (std::size_t i = 0; i < lt.node_count(); ++i)
        for (const Link& l : lt.adj[i]) {
            const Link* back = lt.find(l.to, static_cast<NodeIndex>(i));
            REQUIRE(back);
            CHECK(back->decodable == l.decodable);
        }
}
