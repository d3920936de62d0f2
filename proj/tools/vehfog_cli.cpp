#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vehfog/error.hpp"
#include "vehfog/geometry.hpp"
#include "vehfog/mobility.hpp"
#include "vehfog/radio.hpp"
#include "vehfog/scenario.hpp"
#include "vehfog/sweep.hpp"

namespace fs = std::filesystem;
using namespace vehfog;

namespace {

// Exit codes: 1 for anything the user can fix in the config or arguments, 2 at runtime.
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& p, const std::string& body) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary);
    out << body;
    if (!out) throw RuntimeFailure("cannot write '" + p.string() + "'");
}

Scenario load_with_overrides(const std::string& config, const std::vector<std::string>& sets) {
    Scenario s = config.empty() ? Scenario{} : load_scenario(config);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        s.explicit_keys.erase(kv.substr(0, eq));
        apply_override(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return s;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_summary(std::ostream& os, ProtocolKind p, const RunResult& r) {
    const auto& m = r.report;
    os << "protocol          " << to_string(p) << '\n'
       << "vehicles          " << r.n_vehicles << '\n'
       << "intended pairs    " << m.counts.intended << '\n'
       << "delivered         " << m.counts.delivered << '\n'
       << "collided          " << m.counts.collided << '\n'
       << "dropped_shadow    " << m.counts.dropped_shadow << '\n'
       << "out_of_range      " << m.counts.out_of_range << '\n'
       << "delivery_prob     " << num(m.delivery_probability) << '\n'
       << "delay_mean_s      " << num(m.e2e_delay.mean) << '\n'
       << "delay_p50_s       " << num(m.e2e_delay.p50) << '\n'
       << "delay_p95_s       " << num(m.e2e_delay.p95) << '\n'
       << "delay_max_s       " << num(m.e2e_delay.max) << '\n'
       << "collision_ratio   " << num(m.collision_ratio) << '\n'
       << "m_success         " << num(m.m_success) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical-message dissemination simulator for vehicular fog networks"};
    app.require_subcommand(1);
    app.footer(config_help());

    // run
    auto* run = app.add_subcommand("run", "simulate one scenario");
    std::string run_config, run_out = ".", run_protocol;
    std::optional<std::uint64_t> run_seed;
    std::vector<std::string> run_sets;
    bool print_config = false;
    run->add_option("--config", run_config, "scenario config file (defaults apply when omitted)");
    run->add_option("--seed", run_seed, "override sim.seed");
    run->add_option("--out-dir", run_out, "directory for results.csv, events.csv, hops.csv, frames.csv");
    run->add_option("--protocol", run_protocol, "override protocol");
    run->add_option("--set", run_sets, "override a config key (key=value), repeatable");
    run->add_flag("--print-config", print_config, "print the resolved configuration and exit");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "cross product of densities, seeds and protocols");
    std::string sw_config, sw_out = ".", sw_densities, sw_seeds, sw_protocols;
    std::vector<std::string> sw_sets;
    int sw_jobs = 0;
    sweep->add_option("--config", sw_config, "scenario config file");
    sweep->add_option("--densities", sw_densities, "vehicle counts, '50,100' or 'lo:hi:step' (default 50:300:50)");
    sweep->add_option("--seeds", sw_seeds, "seeds, same syntax (default 1:10:1)");
    sweep->add_option("--protocols,--protocol", sw_protocols, "comma-separated protocols (default all)");
    sweep->add_option("--jobs", sw_jobs, "parallel runs (default: all cores)")->check(CLI::NonNegativeNumber);
    sweep->add_option("--out-dir", sw_out, "directory for results.csv and plot data");
    sweep->add_option("--set", sw_sets, "override a config key (key=value), repeatable");

    // link
    auto* link = app.add_subcommand("link", "link-budget calculator");
    double l_dist = 0, l_obs = 0;
    int l_n = 0;
    LinkBudget lb{};
    AttenuationParams ap{};
    link->add_option("--distance", l_dist, "tx-rx distance [m]")->required();
    link->add_option("--n", l_n, "wall crossings")->check(CLI::NonNegativeNumber);
    link->add_option("--l-obs", l_obs, "length inside buildings [m]")->check(CLI::NonNegativeNumber);
    link->add_option("--alpha", ap.alpha_db, "attenuation per wall [dB]")->capture_default_str();
    link->add_option("--beta", ap.beta_db_per_m, "attenuation per meter [dB/m]")->capture_default_str();
    link->add_option("--tx-power", lb.tx_power_dbm, "transmit power [dBm]")->capture_default_str();
    link->add_option("--gain-tx", lb.gain_tx_dbi, "tx antenna gain [dBi]")->capture_default_str();
    link->add_option("--gain-rx", lb.gain_rx_dbi, "rx antenna gain [dBi]")->capture_default_str();
    link->add_option("--freq", lb.freq_mhz, "carrier frequency [MHz]")->capture_default_str();
    link->add_option("--sensitivity", lb.sensitivity_dbm, "receiver sensitivity [dBm]")->capture_default_str();
    link->add_option("--margin", lb.margin_db, "shadowing margin [dB]")->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "generate input files");
    gen->require_subcommand(1);
    auto* gmap = gen->add_subcommand("map", "Manhattan-grid obstacle map");
    GridSpec grid{};
    std::string gmap_out;
    gmap->add_option("--blocks-x", grid.blocks_x, "blocks along x")->capture_default_str();
    gmap->add_option("--blocks-y", grid.blocks_y, "blocks along y")->capture_default_str();
    gmap->add_option("--block-x", grid.block_x, "block width [m]")->capture_default_str();
    gmap->add_option("--block-y", grid.block_y, "block depth [m]")->capture_default_str();
    gmap->add_option("--street", grid.street, "street width [m]")->capture_default_str();
    gmap->add_option("--inset", grid.inset, "building inset from the block edge [m]")->capture_default_str();
    gmap->add_option("--out", gmap_out, "output file (default stdout)");

    auto* gtrace = gen->add_subcommand("trace", "straight-road mobility trace");
    RoadSpec road{};
    TrafficSpec traffic{};
    std::uint64_t gt_seed = 1;
    std::string gt_out;
    gtrace->add_option("--length", road.length, "road length [m]")->capture_default_str();
    gtrace->add_option("--lanes", road.lanes, "lanes")->capture_default_str();
    gtrace->add_option("--lane-y0", road.lane_y0, "y of lane 0 [m]")->capture_default_str();
    gtrace->add_option("--lane-spacing", road.lane_spacing, "lane spacing [m]")->capture_default_str();
    gtrace->add_option("--vehicles", traffic.vehicles, "vehicles")->capture_default_str();
    gtrace->add_option("--speed-min", traffic.speed_min, "minimum speed [m/s]")->capture_default_str();
    gtrace->add_option("--speed-max", traffic.speed_max, "maximum speed [m/s]")->capture_default_str();
    gtrace->add_option("--duration", traffic.duration, "duration [s]")->capture_default_str();
    gtrace->add_option("--dt", traffic.dt, "sample interval [s]")->capture_default_str();
    gtrace->add_option("--seed", gt_seed, "seed")->capture_default_str();
    gtrace->add_option("--out", gt_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            Scenario s = load_with_overrides(run_config, run_sets);
            if (run_seed) apply_override(s, "sim.seed", std::to_string(*run_seed));
            if (!run_protocol.empty()) apply_override(s, "protocol", run_protocol);
            validate(s);
            if (print_config) {
                std::cout << dump_scenario(s);
                return 0;
            }
            PreparedRun prep = prepare_run(s);
            RunResult r;
            r.n_vehicles = static_cast<std::uint32_t>(prep.trace->vehicle_count());
            try {
                r.log = run_simulation(prep.input);
                r.report = compute_metrics(r.log, r.n_vehicles, s.dmax_s);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw RuntimeFailure(e.what());
            }
            const fs::path out(run_out);
            const ResultRow row{s.protocol, r.n_vehicles, s.seed, r.report};
            write_file(out / "results.csv", results_csv(std::span(&row, 1)));
            write_file(out / "events.csv", write_events_csv(r.log));
            write_file(out / "hops.csv", write_hops_csv(r.log));
            write_file(out / "frames.csv", write_frames_csv(r.log));
            print_summary(std::cout, s.protocol, r);
        } else if (*sweep) {
            Scenario s = load_with_overrides(sw_config, sw_sets);
            SweepSpec spec;
            if (!sw_densities.empty()) spec.densities = parse_int_list(sw_densities);
            for (int n : spec.densities)
                if (n <= 0) throw ConfigError("--densities: values must be positive");
            if (!sw_seeds.empty()) {
                spec.seeds.clear();
                for (int v : parse_int_list(sw_seeds)) {
                    if (v < 0) throw ConfigError("--seeds: values must be non-negative");
                    spec.seeds.push_back(static_cast<std::uint64_t>(v));
                }
            }
            if (!sw_protocols.empty()) {
                spec.protocols.clear();
                std::string flat = sw_protocols;
                std::stringstream ss(flat);
                for (std::string item; std::getline(ss, item, ',');) {
                    const auto p = parse_protocol(item);
                    if (!p) throw ConfigError("--protocols: unknown protocol '" + item + "'");
                    spec.protocols.push_back(*p);
                }
            }
            spec.jobs = sw_jobs;
            const SweepResult res = run_sweep(s, spec);
            const fs::path out(sw_out);
            write_file(out / "results.csv", results_csv(res.rows));
            for (const auto& [name, body] : plot_data(res.rows)) write_file(out / name, body);
            std::cout << res.rows.size() << " runs written to " << (out / "results.csv").string() << '\n';
            if (!res.errors.empty()) {
                for (const auto& e : res.errors) std::cerr << "error: " << e << '\n';
                return 2;
            }
        } else if (*link) {
            if (!(l_dist > 0) || !std::isfinite(l_dist)) throw ConfigError("--distance: must be > 0");
            const ReceiverClass c = classify(lb, ap, l_dist, Obstruction{l_n, l_obs});
            std::cout << "path_loss_db  " << num(c.path_loss_db) << '\n'
                      << "o_shadow_db   " << num(c.o_shadow_db) << '\n'
                      << "p_r_dbm       " << num(c.p_r_dbm) << '\n'
                      << "loc           " << static_cast<int>(c.loc) << '\n';
        } else if (*gmap) {
            if (grid.blocks_x < 1 || grid.blocks_y < 1) throw ConfigError("--blocks-x/--blocks-y: must be >= 1");
            if (!(grid.block_x > 0) || !(grid.block_y > 0)) throw ConfigError("--block-x/--block-y: must be > 0");
            if (!(grid.street >= 0)) throw ConfigError("--street: must be >= 0");
            if (!(grid.inset >= 0) || 2 * grid.inset >= std::min(grid.block_x, grid.block_y))
                throw ConfigError("--inset: must be >= 0 and leave a non-empty building");
            const std::string body = write_map(manhattan_grid(grid));
            if (gmap_out.empty()) std::cout << body;
            else write_file(gmap_out, body);
        } else if (*gtrace) {
            if (!(road.length > 0) || road.lanes < 1 || traffic.vehicles < 1 || !(traffic.dt > 0) ||
                !(traffic.duration > 0) || traffic.speed_min < 0 || traffic.speed_max < traffic.speed_min)
                throw ConfigError("invalid trace generator parameters");
            const std::string body = write_trace(generate_trace(road, traffic, gt_seed));
            if (gt_out.empty()) std::cout << body;
            else write_file(gt_out, body);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
