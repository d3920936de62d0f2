#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vehfog/geometry.hpp"
#include "vehfog/mobility.hpp"
#include "vehfog/radio.hpp"

namespace vehfog {

/// Dense node index: vehicles first (snapshot order), then fog nodes.
using NodeIndex = std::uint32_t;

/// Roadside fog node (RSU / base station). Elevated: its radio links ignore buildings.
struct FogNode {
    std::uint32_t id = 0;
    Point pos{};
    double coverage_m = 300.0;
    double proc_delay_s = 1e-3;
};

/// Static radio environment shared by every link evaluation.
struct RadioEnv {
    const ObstacleMap* map = nullptr;
    LinkBudget link{};
    AttenuationParams atten{};
    double range_m = 300.0;
};

struct Link {
    NodeIndex to = 0;
    double dist = 0.0;
    Obstruction obstruction{};
    double p_r_dbm = 0.0;
    bool decodable = false;  // frame on this link is received absent interference
    Loc loc = Loc::clear;
    friend bool operator==(const Link& a, const Link& b) {
        return a.to == b.to && a.dist == b.dist && a.obstruction.n == b.obstruction.n &&
               a.obstruction.l_obs == b.obstruction.l_obs && a.p_r_dbm == b.p_r_dbm &&
               a.decodable == b.decodable && a.loc == b.loc;
    }
};

/// All candidate links for one mobility snapshot. Vehicle pairs within range_m
/// are present even when not decodable; vehicle/fog pairs within coverage are
/// always decodable. Fog pairs with overlapping coverage link for carrier sense only.
struct LinkTable {
    std::size_t vehicle_count = 0;
    std::vector<Point> positions;
    std::vector<std::vector<Link>> adj;  // each row sorted by `to`

    std::size_t node_count() const { return positions.size(); }
    bool is_fog(NodeIndex i) const { return i >= vehicle_count; }
    const Link* find(NodeIndex from, NodeIndex to) const;
    bool hearable(NodeIndex from, NodeIndex to) const {
        const Link* l = find(from, to);
        return l && l->decodable;
    }
};

/// Parallel kernel: rows are computed independently across OpenMP threads.
LinkTable build_link_table(const RadioEnv& env, std::span<const VehicleState> vehicles,
                           std::span<const FogNode> fogs);

/// Serial O(N^2) reference with no spatial pruning; kept for tests and benchmarks.
LinkTable build_link_table_serial(const RadioEnv& env, std::span<const VehicleState> vehicles,
                                  std::span<const FogNode> fogs);

}  // namespace vehfog
