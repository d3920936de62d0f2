#include "vehfog/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "text_util.hpp"
#include "vehfog/error.hpp"

namespace vehfog {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double need_double(std::string_view key, std::string_view v) {
    const auto d = detail::parse_double(v);
    if (!d || !std::isfinite(*d)) throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
    return *d;
}

long long need_int(std::string_view key, std::string_view v) {
    const auto i = detail::parse_int<long long>(v);
    if (!i) throw ConfigError("key '" + std::string(key) + "': expected an integer, got '" + std::string(v) + "'");
    return *i;
}

bool need_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + std::string(key) + "': expected true/false, got '" + std::string(v) + "'");
}

// Numeric key stored as member * scale (e.g. milliseconds in the file, seconds inside).
template <typename Get>
ConfigKey real(std::string_view name, std::string_view unit, std::string_view help, Get field, double scale = 1.0) {
    return {name, unit, help,
            [=](Scenario& s, std::string_view v) { field(s) = need_double(name, v) * scale; },
            [=](const Scenario& s) { return fmt(field(const_cast<Scenario&>(s)) / scale); }};
}

template <typename Get>
ConfigKey integer(std::string_view name, std::string_view unit, std::string_view help, Get field) {
    return {name, unit, help,
            [=](Scenario& s, std::string_view v) {
                using T = std::remove_reference_t<decltype(field(s))>;
                field(s) = static_cast<T>(need_int(name, v));
            },
            [=](const Scenario& s) { return std::to_string(field(const_cast<Scenario&>(s))); }};
}

template <typename Get>
ConfigKey text(std::string_view name, std::string_view unit, std::string_view help, Get field) {
    return {name, unit, help, [=](Scenario& s, std::string_view v) { field(s) = std::string(v); },
            [=](const Scenario& s) { return field(const_cast<Scenario&>(s)); }};
}

std::vector<ConfigKey> make_keys() {
    std::vector<ConfigKey> k;
    k.push_back(text("map.file", "path", "obstacle map file; empty for an obstacle-free plane",
                     [](Scenario& s) -> std::string& { return s.map_file; }));
    k.push_back(text("trace.file", "path", "vehicle trace CSV; excludes the traffic.* generator keys",
                     [](Scenario& s) -> std::string& { return s.trace_file; }));
    k.push_back(real("road.length_m", "m", "road length (wrap-around)", [](Scenario& s) -> double& { return s.road.length; }));
    k.push_back(integer("road.lanes", "count", "number of lanes", [](Scenario& s) -> int& { return s.road.lanes; }));
    k.push_back(real("road.lane_y0_m", "m", "y coordinate of lane 0", [](Scenario& s) -> double& { return s.road.lane_y0; }));
    k.push_back(real("road.lane_spacing_m", "m", "distance between adjacent lanes", [](Scenario& s) -> double& { return s.road.lane_spacing; }));
    k.push_back(integer("traffic.vehicles", "count", "number of generated vehicles", [](Scenario& s) -> int& { return s.traffic.vehicles; }));
    k.push_back(real("traffic.speed_min_mps", "m/s", "minimum vehicle speed (30 mph = 13.41 m/s)", [](Scenario& s) -> double& { return s.traffic.speed_min; }));
    k.push_back(real("traffic.speed_max_mps", "m/s", "maximum vehicle speed (50 mph = 22.35 m/s)", [](Scenario& s) -> double& { return s.traffic.speed_max; }));
    k.push_back(real("sim.duration_s", "s", "generated trace duration", [](Scenario& s) -> double& { return s.traffic.duration; }));
    k.push_back(real("sim.dt_s", "s", "generated trace sample interval", [](Scenario& s) -> double& { return s.traffic.dt; }));
    k.push_back(integer("sim.seed", "integer", "random seed", [](Scenario& s) -> std::uint64_t& { return s.seed; }));
    k.push_back(real("radio.range_m", "m", "transmission range", [](Scenario& s) -> double& { return s.radio.range_m; }));
    k.push_back(real("radio.tx_power_dbm", "dBm", "transmit power", [](Scenario& s) -> double& { return s.radio.link.tx_power_dbm; }));
    k.push_back(real("radio.gain_tx_dbi", "dBi", "transmit antenna gain", [](Scenario& s) -> double& { return s.radio.link.gain_tx_dbi; }));
    k.push_back(real("radio.gain_rx_dbi", "dBi", "receive antenna gain", [](Scenario& s) -> double& { return s.radio.link.gain_rx_dbi; }));
    k.push_back(real("radio.freq_mhz", "MHz", "carrier frequency", [](Scenario& s) -> double& { return s.radio.link.freq_mhz; }));
    k.push_back(real("radio.sensitivity_dbm", "dBm", "minimum decodable received power", [](Scenario& s) -> double& { return s.radio.link.sensitivity_dbm; }));
    k.push_back(real("radio.margin_db", "dB", "uncertainty band counted as shadowed", [](Scenario& s) -> double& { return s.radio.link.margin_db; }));
    k.push_back(real("shadow.alpha_db", "dB/wall", "attenuation per exterior wall crossing", [](Scenario& s) -> double& { return s.radio.atten.alpha_db; }));
    k.push_back(real("shadow.beta_db_per_m", "dB/m", "attenuation per meter inside buildings", [](Scenario& s) -> double& { return s.radio.atten.beta_db_per_m; }));
    k.push_back(real("mac.data_rate_bps", "bit/s", "channel data rate", [](Scenario& s) -> double& { return s.mac.data_rate_bps; }));
    k.push_back(integer("mac.cw_min", "slots", "minimum contention window", [](Scenario& s) -> int& { return s.mac.cw_min; }));
    k.push_back(integer("mac.cw_max", "slots", "maximum contention window", [](Scenario& s) -> int& { return s.mac.cw_max; }));
    k.push_back(real("mac.slot_us", "us", "backoff slot time", [](Scenario& s) -> double& { return s.mac.slot_s; }, 1e-6));
    k.push_back(integer("mac.max_attempts", "count", "transmission attempts per collided frame", [](Scenario& s) -> int& { return s.mac.max_attempts; }));
    k.push_back(real("mac.proc_relay_ms", "ms", "processing delay at relaying vehicles", [](Scenario& s) -> double& { return s.mac.proc_relay_s; }, 1e-3));
    k.push_back(integer("msg.size_bytes", "bytes", "critical message size", [](Scenario& s) -> std::uint32_t& { return s.msg_size; }));
    k.push_back(real("messages.fraction", "ratio", "share of vehicles emitting one critical message", [](Scenario& s) -> double& { return s.msg_fraction; }));
    k.push_back(real("messages.start_s", "s", "start of the emission interval", [](Scenario& s) -> double& { return s.msg_start_s; }));
    k.push_back(real("messages.window_s", "s", "length of the emission interval", [](Scenario& s) -> double& { return s.msg_window_s; }));
    k.push_back(text("messages.schedule", "id@s list", "explicit emissions 'sender@time ...'; overrides the generator",
                     [](Scenario& s) -> std::string& { return s.msg_schedule; }));
    k.push_back({"protocol", "name", "hybrid_vehfog | flooding | relay_multihop | cloud_relay | fog_only",
                 [](Scenario& s, std::string_view v) {
                     const auto p = parse_protocol(v);
                     if (!p) throw ConfigError("key 'protocol': unknown protocol '" + std::string(v) + "'");
                     s.protocol = *p;
                 },
                 [](const Scenario& s) { return std::string(to_string(s.protocol)); }});
    k.push_back({"decision_rule", "name", "per_receiver_shadowing | success_threshold",
                 [](Scenario& s, std::string_view v) {
                     const auto r = parse_decision_rule(v);
                     if (!r) throw ConfigError("key 'decision_rule': unknown rule '" + std::string(v) + "'");
                     s.rule = *r;
                 },
                 [](const Scenario& s) { return std::string(to_string(s.rule)); }});
    k.push_back(real("dmax_ms", "ms", "delay normalisation deadline for the success rate", [](Scenario& s) -> double& { return s.dmax_s; }, 1e-3));
    k.push_back(real("fog.spacing_m", "m", "fog node spacing along the road", [](Scenario& s) -> double& { return s.fog_spacing_m; }));
    k.push_back(real("fog.coverage_m", "m", "fog node coverage radius", [](Scenario& s) -> double& { return s.fog_coverage_m; }));
    k.push_back(real("fog.proc_ms", "ms", "processing delay at fog nodes", [](Scenario& s) -> double& { return s.fog_proc_s; }, 1e-3));
    k.push_back({"fog.y_m", "m", "fog node y coordinate (default: centre of the lanes)",
                 [](Scenario& s, std::string_view v) { s.fog_y_m = need_double("fog.y_m", v); },
                 [](const Scenario& s) {
                     return fmt(s.fog_y_m.value_or(s.road.lane_y0 + 0.5 * (s.road.lanes - 1) * s.road.lane_spacing));
                 }});
    k.push_back(text("fog.positions", "x:y list", "explicit fog nodes 'x:y ...'; overrides spacing",
                     [](Scenario& s) -> std::string& { return s.fog_positions; }));
    k.push_back(real("cloud.rtt_ms", "ms", "cloud round-trip latency", [](Scenario& s) -> double& { return s.cloud.rtt_s; }, 1e-3));
    k.push_back(real("cloud.gateway_fraction", "ratio", "share of vehicles with a cellular gateway", [](Scenario& s) -> double& { return s.cloud.gateway_fraction; }));
    k.push_back(real("flood.jitter_ms", "ms", "maximum rebroadcast jitter", [](Scenario& s) -> double& { return s.flood.jitter_s; }, 1e-3));
    k.push_back({"beacon.enabled", "bool", "background safety beacons",
                 [](Scenario& s, std::string_view v) { s.beacon.enabled = need_bool("beacon.enabled", v); },
                 [](const Scenario& s) { return std::string(s.beacon.enabled ? "true" : "false"); }});
    k.push_back(real("beacon.interval_ms", "ms", "beacon period", [](Scenario& s) -> double& { return s.beacon.interval_s; }, 1e-3));
    k.push_back(integer("beacon.size_bytes", "bytes", "beacon size", [](Scenario& s) -> std::uint32_t& { return s.beacon.size_bytes; }));
    return k;
}

bool is_generator_key(std::string_view k) {
    return k.starts_with("traffic.") || k == "sim.duration_s" || k == "sim.dt_s";
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = make_keys();
    return keys;
}

void apply_override(Scenario& s, std::string_view key, std::string_view value) {
    const auto& keys = config_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
    if (it == keys.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    it->set(s, detail::trim(value));
    s.explicit_keys.insert(std::string(key));
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    Scenario s;
    s.base_dir = base_dir;
    const auto lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto body = detail::trim(detail::strip_comment(lines[i]));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(i + 1) + ": expected 'key = value'");
        const auto key = detail::trim(body.substr(0, eq));
        if (s.explicit_keys.contains(std::string(key)))
            throw ConfigError("line " + std::to_string(i + 1) + ": duplicate key '" + std::string(key) + "'");
        try {
            apply_override(s, key, body.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), file.parent_path());
}

namespace {

void check(bool ok, std::string_view key, std::string_view rule) {
    if (!ok) throw ConfigError("key '" + std::string(key) + "': " + std::string(rule));
}

std::filesystem::path resolve(const Scenario& s, const std::string& f) {
    std::filesystem::path p(f);
    return p.is_absolute() ? p : s.base_dir / p;
}

std::string slurp(const std::filesystem::path& p, std::string_view key) {
    std::ifstream in(p);
    if (!in) throw ConfigError("key '" + std::string(key) + "': cannot open '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void validate(const Scenario& s) {
    check(s.road.length > 0, "road.length_m", "must be > 0");
    check(s.road.lanes >= 1, "road.lanes", "must be >= 1");
    check(s.road.lane_spacing >= 0, "road.lane_spacing_m", "must be >= 0");
    check(s.traffic.vehicles >= 1, "traffic.vehicles", "must be >= 1");
    check(s.traffic.speed_min >= 0, "traffic.speed_min_mps", "must be >= 0");
    check(s.traffic.speed_max >= s.traffic.speed_min, "traffic.speed_max_mps", "must be >= traffic.speed_min_mps");
    check(s.traffic.duration > 0, "sim.duration_s", "must be > 0");
    check(s.traffic.dt > 0, "sim.dt_s", "must be > 0");
    check(s.radio.range_m > 0, "radio.range_m", "must be > 0");
    check(s.radio.link.freq_mhz > 0, "radio.freq_mhz", "must be > 0");
    check(s.radio.link.margin_db >= 0, "radio.margin_db", "must be >= 0");
    check(s.radio.atten.alpha_db >= 0, "shadow.alpha_db", "must be >= 0");
    check(s.radio.atten.beta_db_per_m >= 0, "shadow.beta_db_per_m", "must be >= 0");
    check(s.mac.data_rate_bps > 0, "mac.data_rate_bps", "must be > 0");
    check(s.mac.cw_min >= 0, "mac.cw_min", "must be >= 0");
    check(s.mac.cw_max >= s.mac.cw_min, "mac.cw_max", "must be >= mac.cw_min");
    check(s.mac.slot_s >= 0, "mac.slot_us", "must be >= 0");
    check(s.mac.max_attempts >= 1, "mac.max_attempts", "must be >= 1");
    check(s.mac.proc_relay_s >= 0, "mac.proc_relay_ms", "must be >= 0");
    check(s.msg_size > 0, "msg.size_bytes", "must be > 0");
    check(s.msg_fraction > 0 && s.msg_fraction <= 1, "messages.fraction", "must be in (0, 1]");
    check(s.msg_start_s >= 0, "messages.start_s", "must be >= 0");
    check(s.msg_window_s >= 0, "messages.window_s", "must be >= 0");
    check(s.dmax_s > 0, "dmax_ms", "must be > 0");
    check(s.fog_spacing_m > 0, "fog.spacing_m", "must be > 0");
    check(s.fog_coverage_m > 0, "fog.coverage_m", "must be > 0");
    check(s.fog_proc_s >= 0, "fog.proc_ms", "must be >= 0");
    check(s.cloud.rtt_s >= 0, "cloud.rtt_ms", "must be >= 0");
    check(s.cloud.gateway_fraction >= 0 && s.cloud.gateway_fraction <= 1, "cloud.gateway_fraction", "must be in [0, 1]");
    check(s.flood.jitter_s >= 0, "flood.jitter_ms", "must be >= 0");
    check(s.beacon.interval_s > 0, "beacon.interval_ms", "must be > 0");
    check(s.beacon.size_bytes > 0, "beacon.size_bytes", "must be > 0");
    if (!s.trace_file.empty()) {
        for (const auto& k : s.explicit_keys)
            if (is_generator_key(k))
                throw ConfigError("key '" + k + "': not allowed together with trace.file (specify one of trace file or generator)");
        check(std::filesystem::exists(resolve(s, s.trace_file)), "trace.file", "file does not exist");
    }
    if (!s.map_file.empty()) check(std::filesystem::exists(resolve(s, s.map_file)), "map.file", "file does not exist");
    if (!s.msg_schedule.empty()) {
        for (const char* k : {"messages.fraction", "messages.start_s", "messages.window_s"})
            if (s.explicit_keys.contains(k))
                throw ConfigError(std::string("key '") + k + "': not allowed together with messages.schedule");
        parse_schedule(s.msg_schedule, s.msg_size);
    }
}

std::string dump_scenario(const Scenario& s) {
    std::ostringstream os;
    for (const auto& k : config_keys()) os << k.name << " = " << k.get(s) << '\n';
    return os.str();
}

std::string config_help() {
    std::ostringstream os;
    os << "Config keys (file format: 'key = value', '#' comments):\n";
    for (const auto& k : config_keys()) {
        Scenario defaults;
        std::string name(k.name);
        os << "  " << name << std::string(name.size() < 26 ? 26 - name.size() : 1, ' ') << "[" << k.unit << "] "
           << k.help << " (default: " << (k.get(defaults).empty() ? "none" : k.get(defaults)) << ")\n";
    }
    return os.str();
}

std::vector<Message> parse_schedule(std::string_view text, std::uint32_t size) {
    std::vector<Message> out;
    std::string flat(text);
    std::replace(flat.begin(), flat.end(), ',', ' ');
    for (auto item : detail::split_ws(flat)) {
        const auto at = item.find('@');
        const auto id = at == std::string_view::npos ? std::nullopt : detail::parse_int<VehicleId>(item.substr(0, at));
        const auto t = at == std::string_view::npos ? std::nullopt : detail::parse_double(item.substr(at + 1));
        if (!id || !t || *t < 0)
            throw ConfigError("key 'messages.schedule': bad entry '" + std::string(item) + "' (expected sender@time)");
        out.push_back({0, *id, size, *t});
    }
    std::stable_sort(out.begin(), out.end(), [](const Message& a, const Message& b) { return a.created_at < b.created_at; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<MessageId>(i);
    return out;
}

std::vector<Message> generate_messages(const VehicleTrace& trace, double fraction, double start_s,
                                       double window_s, std::uint32_t size, std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0x4d5347}};
    std::mt19937_64 rng(seq);
    const auto& vehicles = trace.snapshots.front().vehicles;
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(vehicles.size()))));
    std::vector<VehicleId> ids;
    for (const auto& v : vehicles) ids.push_back(v.id);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(count, ids.size()));
    std::uniform_real_distribution<double> when(0.0, 1.0);
    std::vector<Message> out;
    for (VehicleId id : ids) out.push_back({0, id, size, start_s + window_s * when(rng)});
    std::sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.origin < b.origin;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<MessageId>(i);
    return out;
}

namespace {

std::vector<FogNode> fog_layout(const Scenario& s) {
    std::vector<FogNode> fogs;
    if (!s.fog_positions.empty()) {
        std::string flat(s.fog_positions);
        std::replace(flat.begin(), flat.end(), ',', ' ');
        for (auto item : detail::split_ws(flat)) {
            const auto colon = item.find(':');
            const auto x = colon == std::string_view::npos ? std::nullopt : detail::parse_double(item.substr(0, colon));
            const auto y = colon == std::string_view::npos ? std::nullopt : detail::parse_double(item.substr(colon + 1));
            if (!x || !y) throw ConfigError("key 'fog.positions': bad entry '" + std::string(item) + "' (expected x:y)");
            fogs.push_back({static_cast<std::uint32_t>(fogs.size()), {*x, *y}, s.fog_coverage_m, s.fog_proc_s});
        }
        return fogs;
    }
    const double y = s.fog_y_m.value_or(s.road.lane_y0 + 0.5 * (s.road.lanes - 1) * s.road.lane_spacing);
    return place_fog_nodes(s.road.length, s.fog_spacing_m, y, s.fog_coverage_m, s.fog_proc_s);
}

}  // namespace

PreparedRun prepare_run(const Scenario& s, std::optional<int> vehicles, std::optional<std::uint64_t> seed) {
    validate(s);
    const std::uint64_t run_seed = seed.value_or(s.seed);
    PreparedRun run;
    if (!s.map_file.empty()) {
        try {
            run.map = std::make_shared<ObstacleMap>(load_map(slurp(resolve(s, s.map_file), "map.file")));
        } catch (const ParseError& e) {
            throw ConfigError("key 'map.file': " + std::string(e.what()));
        } catch (const ValidationError& e) {
            throw ConfigError("key 'map.file': " + std::string(e.what()));
        }
    }
    if (!s.trace_file.empty()) {
        if (vehicles) throw ConfigError("key 'trace.file': vehicle count cannot be overridden for a trace file");
        try {
            run.trace = std::make_shared<VehicleTrace>(load_trace(slurp(resolve(s, s.trace_file), "trace.file")));
        } catch (const ParseError& e) {
            throw ConfigError("key 'trace.file': " + std::string(e.what()));
        } catch (const ValidationError& e) {
            throw ConfigError("key 'trace.file': " + std::string(e.what()));
        }
    } else {
        TrafficSpec traffic = s.traffic;
        if (vehicles) traffic.vehicles = *vehicles;
        run.trace = std::make_shared<VehicleTrace>(generate_trace(s.road, traffic, run_seed));
    }

    SimulationInput& in = run.input;
    in.map = run.map.get();
    in.trace = run.trace.get();
    in.radio = s.radio;
    in.radio.map = run.map.get();
    in.mac = s.mac;
    in.fogs = fog_layout(s);
    in.protocol = s.protocol;
    in.rule = s.rule;
    in.cloud = s.cloud;
    in.flood = s.flood;
    in.beacon = s.beacon;
    in.dmax_s = s.dmax_s;
    in.seed = run_seed;
    in.messages = s.msg_schedule.empty()
                      ? generate_messages(*run.trace, s.msg_fraction, s.msg_start_s, s.msg_window_s, s.msg_size, run_seed)
                      : parse_schedule(s.msg_schedule, s.msg_size);
    return run;
}

RunResult run_scenario(const Scenario& s) {
    PreparedRun run = prepare_run(s);
    RunResult r;
    r.n_vehicles = static_cast<std::uint32_t>(run.trace->vehicle_count());
    r.log = run_simulation(run.input);
    r.report = compute_metrics(r.log, r.n_vehicles, s.dmax_s);
    return r;
}

}  // namespace vehfog
