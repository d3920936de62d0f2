#pragma once

#include <random>
#include <string>
#include <vector>

#include "vehfog/engine.hpp"
#include "vehfog/geometry.hpp"
#include "vehfog/mobility.hpp"
#include "vehfog/network.hpp"

namespace vehfog::test {

// Vehicles parked at fixed points for the whole run.
inline VehicleTrace parked(const std::vector<Point>& pts, double until = 100.0) {
    VehicleTrace tr;
    tr.sample_interval = until;
    for (double t : {0.0, until}) {
        Snapshot s;
        s.t = t;
        for (std::size_t i = 0; i < pts.size(); ++i)
            s.vehicles.push_back({static_cast<VehicleId>(i), pts[i], 0.0, 0});
        tr.snapshots.push_back(std::move(s));
    }
    return tr;
}

inline SimulationInput input_for(const VehicleTrace& trace, const ObstacleMap* map, ProtocolKind p,
                                 std::vector<Message> msgs, std::vector<FogNode> fogs = {}) {
    SimulationInput in;
    in.trace = &trace;
    in.map = map;
    in.radio.map = map;
    in.protocol = p;
    in.messages = std::move(msgs);
    in.fogs = std::move(fogs);
    return in;
}

inline Message msg(MessageId id, VehicleId origin, double t) { return {id, origin, 256, t}; }

// Random non-overlapping buildings inside [0,w]x[0,h], rejection sampled.
inline std::vector<Rect> random_buildings(std::mt19937_64& rng, int count, double w, double h) {
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), us(5.0, w / 3.0);
    std::vector<Rect> out;
    for (int tries = 0; static_cast<int>(out.size()) < count && tries < 1000; ++tries) {
        const double x = ux(rng), y = uy(rng);
        Rect r{x, y, std::min(w, x + us(rng)), std::min(h, y + us(rng))};
        if (r.width() < 1.0 || r.height() < 1.0) continue;
        bool clash = false;
        for (const Rect& o : out)
            clash |= r.x_min < o.x_max && o.x_min < r.x_max && r.y_min < o.y_max && o.y_min < r.y_max;
        if (!clash) out.push_back(r);
    }
    return out;
}

}  // namespace vehfog::test
