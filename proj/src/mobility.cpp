#include "vehfog/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "text_util.hpp"
#include "vehfog/error.hpp"

namespace vehfog {

std::size_t VehicleTrace::snapshot_index(double t) const {
    auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                               [](double v, const Snapshot& s) { return v < s.t; });
    if (it == snapshots.begin()) return 0;
    return static_cast<std::size_t>(std::distance(snapshots.begin(), it)) - 1;
}

VehicleTrace generate_trace(const RoadSpec& road, const TrafficSpec& traffic, std::uint64_t seed) {
    if (traffic.vehicles < 1) throw DomainError("generate_trace: need at least one vehicle");
    if (!(traffic.duration > 0.0) || !(traffic.dt > 0.0))
        throw DomainError("generate_trace: duration and dt must be positive");
    if (!(road.length > 0.0) || road.lanes < 1) throw DomainError("generate_trace: bad road geometry");
    if (!(traffic.speed_min >= 0.0) || traffic.speed_max < traffic.speed_min)
        throw DomainError("generate_trace: bad speed range");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start_x(0.0, road.length);
    std::uniform_int_distribution<int> lane_pick(0, road.lanes - 1);
    std::uniform_real_distribution<double> speed_pick(traffic.speed_min, traffic.speed_max);

    struct Init {
        double x0;
        int lane;
        double v;
    };
    std::vector<Init> init(static_cast<std::size_t>(traffic.vehicles));
    for (auto& v : init) {
        v.x0 = start_x(rng);
        v.lane = lane_pick(rng);
        v.v = traffic.speed_min == traffic.speed_max ? traffic.speed_min : speed_pick(rng);
    }

    VehicleTrace trace;
    trace.sample_interval = traffic.dt;
    const auto steps = static_cast<std::size_t>(std::floor(traffic.duration / traffic.dt + 1e-9));
    trace.snapshots.reserve(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        Snapshot snap;
        snap.t = static_cast<double>(k) * traffic.dt;
        snap.vehicles.reserve(init.size());
        for (std::size_t i = 0; i < init.size(); ++i) {
            double x = std::fmod(init[i].x0 + init[i].v * snap.t, road.length);
            if (x < 0.0) x += road.length;
            snap.vehicles.push_back({static_cast<VehicleId>(i),
                                     {x, road.lane_y0 + init[i].lane * road.lane_spacing},
                                     init[i].v,
                                     init[i].lane});
        }
        trace.snapshots.push_back(std::move(snap));
    }
    return trace;
}

VehicleTrace load_trace(std::string_view csv) {
    const auto lines = detail::lines_of(csv);
    if (lines.empty() || detail::trim(lines[0]) != "t,id,x,y,speed,lane")
        throw ParseError(1, "expected header 't,id,x,y,speed,lane'");

    VehicleTrace trace;
    std::set<VehicleId> first_ids;
    std::set<VehicleId> current_ids;
    auto close_snapshot = [&](std::size_t line_no) {
        if (trace.snapshots.empty()) return;
        auto& snap = trace.snapshots.back();
        std::sort(snap.vehicles.begin(), snap.vehicles.end(),
                  [](const VehicleState& a, const VehicleState& b) { return a.id < b.id; });
        if (trace.snapshots.size() == 1)
            first_ids = current_ids;
        else if (current_ids != first_ids)
            throw ValidationError(line_no, "snapshot at t=" + detail::format_double(snap.t) +
                                               " does not contain the same vehicle set");
        current_ids.clear();
    };

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto body = detail::trim(lines[i]);
        if (body.empty()) continue;
        const auto f = detail::split(body, ',');
        if (f.size() != 6) throw ParseError(line_no, "expected 6 fields");
        const auto t = detail::parse_double(f[0]);
        const auto id = detail::parse_int<VehicleId>(f[1]);
        const auto x = detail::parse_double(f[2]);
        const auto y = detail::parse_double(f[3]);
        const auto speed = detail::parse_double(f[4]);
        const auto lane = detail::parse_int<int>(f[5]);
        if (!t || !id || !x || !y || !speed || !lane) throw ParseError(line_no, "malformed field");
        if (*speed < 0.0) throw ValidationError(line_no, "negative speed");
        if (*lane < 0) throw ValidationError(line_no, "negative lane");

        if (trace.snapshots.empty() || *t > trace.snapshots.back().t) {
            close_snapshot(line_no);
            trace.snapshots.push_back({*t, {}});
        } else if (*t < trace.snapshots.back().t) {
            throw ValidationError(line_no, "time decreases (rows must be grouped by non-decreasing t)");
        }
        if (!current_ids.insert(*id).second)
            throw ValidationError(line_no, "vehicle " + std::to_string(*id) + " repeated in snapshot");
        trace.snapshots.back().vehicles.push_back({*id, {*x, *y}, *speed, *lane});
    }
    close_snapshot(lines.size());
    if (trace.snapshots.empty()) throw ParseError(lines.size(), "trace has no rows");
    trace.sample_interval =
        trace.snapshots.size() > 1 ? trace.snapshots[1].t - trace.snapshots[0].t : 0.0;
    return trace;
}

std::string write_trace(const VehicleTrace& trace) {
    using detail::format_double;
    std::ostringstream os;
    os << "t,id,x,y,speed,lane\n";
    for (const auto& snap : trace.snapshots)
        for (const auto& v : snap.vehicles)
            os << format_double(snap.t) << ',' << v.id << ',' << format_double(v.pos.x) << ','
               << format_double(v.pos.y) << ',' << format_double(v.speed) << ',' << v.lane << '\n';
    return os.str();
}

std::vector<VehicleId> neighbors_in_range(std::span<const VehicleState> states, VehicleId sender,
                                          double r) {
    if (!(r > 0.0)) throw DomainError("neighbors_in_range: r must be positive");
    const auto self = std::find_if(states.begin(), states.end(),
                                   [&](const VehicleState& v) { return v.id == sender; });
    if (self == states.end()) throw RangeError("neighbors_in_range: unknown sender " + std::to_string(sender));
    std::vector<VehicleId> out;
    for (const auto& v : states)
        if (v.id != sender && distance(self->pos, v.pos) <= r) out.push_back(v.id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace vehfog
