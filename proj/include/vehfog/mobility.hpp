#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vehfog/geometry.hpp"

namespace vehfog {

using VehicleId = std::uint32_t;

struct VehicleState {
    VehicleId id = 0;
    Point pos{};
    double speed = 0.0;  // m/s
    int lane = 0;
    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct Snapshot {
    double t = 0.0;
    std::vector<VehicleState> vehicles;  // sorted by id
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Time-ordered snapshots; every snapshot holds the same vehicle set.
struct VehicleTrace {
    double sample_interval = 0.0;
    std::vector<Snapshot> snapshots;

    /// Index of the last snapshot with time <= t (first snapshot if t precedes all).
    std::size_t snapshot_index(double t) const;
    std::size_t vehicle_count() const { return snapshots.empty() ? 0 : snapshots.front().vehicles.size(); }
    friend bool operator==(const VehicleTrace&, const VehicleTrace&) = default;
};

/// Straight multi-lane road along +x with wrap-around at road_length. Lane k
/// runs at y = lane_y0 + k * lane_spacing.
struct RoadSpec {
    double length = 10000.0;
    int lanes = 3;
    double lane_y0 = 5.0;
    double lane_spacing = 3.5;
};

struct TrafficSpec {
    int vehicles = 100;
    // 30-50 mph
    double speed_min = 13.41;
    double speed_max = 22.35;
    double duration = 10.0;
    double dt = 0.5;
};

VehicleTrace generate_trace(const RoadSpec& road, const TrafficSpec& traffic, std::uint64_t seed);

/// CSV with header t,id,x,y,speed,lane.
VehicleTrace load_trace(std::string_view csv);
std::string write_trace(const VehicleTrace& trace);

/// Ids of vehicles other than sender within distance r (inclusive), ascending.
std::vector<VehicleId> neighbors_in_range(std::span<const VehicleState> states, VehicleId sender,
                                          double r);

}  // namespace vehfog
