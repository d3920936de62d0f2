// Link-table construction: OpenMP kernel against the serial reference.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vehfog/geometry.hpp"
#include "vehfog/network.hpp"
#include "vehfog/protocols.hpp"

using namespace vehfog;

namespace {

struct Fixture {
    ObstacleMap map;
    std::vector<VehicleState> vehicles;
    std::vector<FogNode> fogs;
};

// Two rows of 80 m blocks along a 10 km road, vehicles spread over three lanes.
Fixture make_fixture(int n) {
    std::vector<Rect> blocks;
    for (int i = 0; i < 100; ++i)
        for (double y : {20.0, 120.0}) blocks.push_back({20.0 + 100 * i, y, 100.0 + 100 * i, y + 80});
    Fixture f{ObstacleMap({0, 0, 10020, 220}, blocks), {}, place_fog_nodes(10000, 500, 110, 300, 1e-3)};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0, 10000);
    std::uniform_int_distribution<int> lane(0, 2);
    for (int i = 0; i < n; ++i)
        f.vehicles.push_back({static_cast<VehicleId>(i), {ux(rng), 10.0 + 100 * lane(rng)}, 0, 0});
    return f;
}

template <bool Parallel>
void link_table(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<int>(state.range(0)));
    RadioEnv env;
    env.map = &f.map;
    for (auto _ : state) {
        auto lt = Parallel ? build_link_table(env, f.vehicles, f.fogs) : build_link_table_serial(env, f.vehicles, f.fogs);
        benchmark::DoNotOptimize(lt);
    }
    state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(link_table<true>)->Name("link_table/parallel")->RangeMultiplier(2)->Range(50, 800)->Complexity();
BENCHMARK(link_table<false>)->Name("link_table/serial")->RangeMultiplier(2)->Range(50, 800)->Complexity();

BENCHMARK_MAIN();
