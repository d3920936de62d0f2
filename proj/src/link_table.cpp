#include "vehfog/network.hpp"

#include <algorithm>
#include <numeric>

namespace vehfog {
namespace {

Link vehicle_link(const RadioEnv& env, NodeIndex to, Point a, Point b, double d) {
    static const ObstacleMap kEmpty;
    const ObstacleMap& map = env.map ? *env.map : kEmpty;
    // Co-located vehicles are treated as 1 m apart for path loss.
    const Obstruction o = a == b ? Obstruction{} : los_obstruction(map, a, b);
    const ReceiverClass rc = classify(env.link, env.atten, std::max(d, 1.0), o);
    return {to, d, rc.obstruction, rc.p_r_dbm, rc.p_r_dbm >= env.link.sensitivity_dbm, rc.loc};
}

Link fog_link(NodeIndex to, double d) { return {to, d, {}, 0.0, true, Loc::clear}; }

// Row i of the table given a precomputed candidate filter.
template <typename Candidates>
std::vector<Link> build_row(const RadioEnv& env, std::span<const VehicleState> vehicles,
                            std::span<const FogNode> fogs, const std::vector<Point>& pos,
                            NodeIndex i, Candidates&& candidates) {
    const std::size_t nv = vehicles.size();
    std::vector<Link> row;
    if (i < nv) {
        candidates([&](NodeIndex j) {
            if (j == i) return;
            const double d = distance(pos[i], pos[j]);
            if (d <= env.range_m) row.push_back(vehicle_link(env, j, pos[i], pos[j], d));
        });
        for (std::size_t f = 0; f < fogs.size(); ++f) {
            const double d = distance(pos[i], fogs[f].pos);
            if (d <= fogs[f].coverage_m) row.push_back(fog_link(static_cast<NodeIndex>(nv + f), d));
        }
    } else {
        const FogNode& fog = fogs[i - nv];
        candidates([&](NodeIndex j) {
            const double d = distance(fog.pos, pos[j]);
            if (d <= fog.coverage_m) row.push_back(fog_link(j, d));
        });
        // Fog nodes whose coverage discs meet can disturb a common receiver, so
        // they sense each other. These links carry no traffic; fogs talk over backhaul.
        for (std::size_t g = 0; g < fogs.size(); ++g) {
            if (nv + g == i) continue;
            const double d = distance(fog.pos, fogs[g].pos);
            if (d <= fog.coverage_m + fogs[g].coverage_m) row.push_back(fog_link(static_cast<NodeIndex>(nv + g), d));
        }
    }
    std::sort(row.begin(), row.end(), [](const Link& a, const Link& b) { return a.to < b.to; });
    return row;
}

std::vector<Point> node_positions(std::span<const VehicleState> vehicles,
                                  std::span<const FogNode> fogs) {
    std::vector<Point> pos;
    pos.reserve(vehicles.size() + fogs.size());
    for (const auto& v : vehicles) pos.push_back(v.pos);
    for (const auto& f : fogs) pos.push_back(f.pos);
    return pos;
}

}  // namespace

const Link* LinkTable::find(NodeIndex from, NodeIndex to) const {
    const auto& row = adj[from];
    auto it = std::lower_bound(row.begin(), row.end(), to,
                               [](const Link& l, NodeIndex v) { return l.to < v; });
    return (it != row.end() && it->to == to) ? &*it : nullptr;
}

LinkTable build_link_table(const RadioEnv& env, std::span<const VehicleState> vehicles,
                           std::span<const FogNode> fogs) {
    LinkTable table;
    table.vehicle_count = vehicles.size();
    table.positions = node_positions(vehicles, fogs);
    const std::size_t nv = vehicles.size();
    const std::size_t n = table.positions.size();
    table.adj.resize(n);

    // Vehicles sorted by x so each row only scans a window of width 2R.
    std::vector<NodeIndex> by_x(nv);
    std::iota(by_x.begin(), by_x.end(), NodeIndex{0});
    std::sort(by_x.begin(), by_x.end(), [&](NodeIndex a, NodeIndex b) {
        return table.positions[a].x < table.positions[b].x || (table.positions[a].x == table.positions[b].x && a < b);
    });
    double reach = env.range_m;
    for (const auto& f : fogs) reach = std::max(reach, f.coverage_m);

    const auto& pos = table.positions;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = pos[i].x;
        auto window = [&](auto&& visit) {
            auto lo = std::partition_point(by_x.begin(), by_x.end(),
                                           [&](NodeIndex j) { return pos[j].x < xi - reach; });
            for (; lo != by_x.end() && pos[*lo].x <= xi + reach; ++lo) visit(*lo);
        };
        table.adj[i] = build_row(env, vehicles, fogs, pos, static_cast<NodeIndex>(i), window);
    }
    return table;
}

LinkTable build_link_table_serial(const RadioEnv& env, std::span<const VehicleState> vehicles,
                                  std::span<const FogNode> fogs) {
    LinkTable table;
    table.vehicle_count = vehicles.size();
    table.positions = node_positions(vehicles, fogs);
    const std::size_t nv = vehicles.size();
    table.adj.resize(table.positions.size());
    for (std::size_t i = 0; i < table.positions.size(); ++i) {
        auto all = [&](auto&& visit) {
            for (std::size_t j = 0; j < nv; ++j) visit(static_cast<NodeIndex>(j));
        };
        table.adj[i] = build_row(env, vehicles, fogs, table.positions, static_cast<NodeIndex>(i), all);
    }
    return table;
}

}  // namespace vehfog
