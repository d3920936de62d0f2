#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vehfog/engine.hpp"
#include "vehfog/metrics.hpp"

namespace vehfog {

/// Fully resolved run configuration. Defaults follow the 802.11p / DSRC
/// evaluation setup: 10 km 3-lane road, 300 m range, 2 Mbit/s, 256 B, CW 31/1023.
struct Scenario {
    std::filesystem::path base_dir;  // relative file keys resolve against this
    std::string map_file;            // empty: obstacle-free
    std::string trace_file;          // empty: generated from road/traffic keys

    RoadSpec road{};
    TrafficSpec traffic{};
    RadioEnv radio{};
    MacParams mac{};

    std::uint32_t msg_size = 256;
    double msg_fraction = 0.1;  // share of vehicles that emit one critical message
    double msg_start_s = 1.0;
    double msg_window_s = 0.1;
    std::string msg_schedule;  // explicit "sender@time ..." list, overrides the generator

    ProtocolKind protocol = ProtocolKind::hybrid_vehfog;
    DecisionRule rule = DecisionRule::per_receiver_shadowing;
    double dmax_s = 0.1;

    double fog_spacing_m = 1000.0;
    double fog_coverage_m = 600.0;
    double fog_proc_s = 1e-3;
    std::optional<double> fog_y_m;  // default: centre of the lane band
    std::string fog_positions;      // explicit "x:y ..." list, overrides spacing

    CloudParams cloud{};
    FloodParams flood{};
    BeaconParams beacon{};
    std::uint64_t seed = 1;

    std::set<std::string> explicit_keys;
};

struct ConfigKey {
    std::string_view name;
    std::string_view unit;
    std::string_view help;
    std::function<void(Scenario&, std::string_view)> set;  // throws ConfigError naming the key
    std::function<std::string(const Scenario&)> get;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Parse `section.key = value` text. Unknown keys and bad values throw ConfigError.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);
void apply_override(Scenario& s, std::string_view key, std::string_view value);

/// Range checks and cross-key rules; throws ConfigError.
void validate(const Scenario& s);

/// Resolved configuration in the same text format parse_scenario accepts.
std::string dump_scenario(const Scenario& s);

/// Key listing for --help.
std::string config_help();

/// Owns everything a single simulation run references.
struct PreparedRun {
    std::shared_ptr<const ObstacleMap> map;  // null when obstacle-free
    std::shared_ptr<const VehicleTrace> trace;
    SimulationInput input;
};

/// Build inputs for one run; `vehicles` and `seed` override the scenario when set.
PreparedRun prepare_run(const Scenario& s, std::optional<int> vehicles = std::nullopt,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Generated message schedule: distinct random senders, uniform times in the window.
std::vector<Message> generate_messages(const VehicleTrace& trace, double fraction, double start_s,
                                       double window_s, std::uint32_t size, std::uint64_t seed);

std::vector<Message> parse_schedule(std::string_view text, std::uint32_t size);

struct RunResult {
    EventLog log;
    MetricsReport report;
    std::uint32_t n_vehicles = 0;
};

RunResult run_scenario(const Scenario& s);

}  // namespace vehfog
