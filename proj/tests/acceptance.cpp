// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "support.hpp"
#include "vehfog/engine.hpp"
#include "vehfog/geometry.hpp"
#include "vehfog/metrics.hpp"
#include "vehfog/network.hpp"
#include "vehfog/protocols.hpp"
#include "vehfog/radio.hpp"
#include "vehfog/scenario.hpp"
#include "vehfog/sweep.hpp"

using namespace vehfog;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = VEHFOG_CONFIG_DIR;
int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (i + j) / 2.0 + 1.0;  // ties share the mean rank
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

void formula_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = transmission_delay(256, 2e6) == 1.024e-3;
    double worst = 0;
    for (double d : {1.0, 300.0, 1e4}) worst = std::max(worst, std::abs(distance_from_loss(fspl_db(d, 5900), 5900) / d - 1.0));
    ok &= worst <= 1e-6;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ul(0, 500), ua(0, 30);
    std::uniform_int_distribution<int> un(0, 20);
    bool linear = true;
    for (int i = 0; i < 100000; ++i) {
        const AttenuationParams p{ua(rng), ua(rng) / 10};
        const Obstruction o{un(rng), ul(rng)};
        linear &= obstacle_attenuation(o, p) == p.alpha_db * o.n + p.beta_db_per_m * o.l_obs;
    }
    ok &= linear;
    const double secs = seconds_since(t0);
    ok &= secs < 1.0;
    report(1, ok, "formula fidelity",
           "t_trans(256 B, 2 Mbit/s)=" + fmt("%.9g", transmission_delay(256, 2e6)) + " s, round-trip error " +
               fmt("%.2e", worst) + ", linear form " + (linear ? "exact" : "broken") + ", " + fmt("%.3f", secs) + " s");
}

void geometry_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(0, 1000), uy(0, 600);
    std::uniform_int_distribution<int> count(1, 4);
    int n_mismatch = 0, l_mismatch = 0;
    double worst_l = 0;
    for (int c = 0; c < 1000; ++c) {
        const auto b = test::random_buildings(rng, count(rng), 1000, 600);
        const ObstacleMap m({0, 0, 1000, 600}, b);
        const Point p1{ux(rng), uy(rng)}, p2{ux(rng), uy(rng)};
        const auto got = los_obstruction(m, p1, p2);
        const auto want = oracle::sample_obstruction(b, p1, p2, 100000);
        const double tol = 2.0 * distance(p1, p2) / 1e5;
        n_mismatch += got.n != want.n;
        const double err = std::abs(got.l_obs - want.l_obs);
        l_mismatch += err > tol;
        worst_l = std::max(worst_l, err / std::max(tol, 1e-300));
    }
    const double secs = seconds_since(t0);
    report(2, n_mismatch == 0 && l_mismatch == 0 && secs < 30, "geometry oracle, 1000 random cases",
           std::to_string(n_mismatch) + " n mismatches, " + std::to_string(l_mismatch) +
               " l_obs outside tolerance (worst " + fmt("%.2f", worst_l) + " of tolerance), " + fmt("%.1f", secs) + " s");
}

void degenerate_map() {
    Scenario s = load_scenario(kConfigs / "manhattan.cfg");
    s.map_file.clear();
    int differ = 0, runs = 0;
    for (int n : {50, 300})
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            std::string logs[2];
            int k = 0;
            for (ProtocolKind p : {ProtocolKind::hybrid_vehfog, ProtocolKind::relay_multihop}) {
                s.protocol = p;
                const auto run = prepare_run(s, n, seed);
                const auto log = run_simulation(run.input);
                logs[k++] = write_events_csv(log) + write_hops_csv(log) + write_frames_csv(log);
            }
            differ += logs[0] != logs[1];
            ++runs;
        }
    report(3, differ == 0, "obstacle-free map: hybrid and multi-hop baseline logs identical",
           std::to_string(runs - differ) + "/" + std::to_string(runs) + " identical");
}

void guaranteed_delivery() {
    std::vector<Point> pts{{500, 10}};
    for (int i = 0; i < 10; ++i) pts.push_back({365.0 + 30 * i, 110});
    const auto tr = test::parked(pts);
    const auto m = load_map("bounds 0 0 1000 300\n0 20 1000 100\n");
    std::map<ProtocolKind, double> dp;
    double shadowed = 0;
    for (ProtocolKind p : {ProtocolKind::hybrid_vehfog, ProtocolKind::fog_only, ProtocolKind::relay_multihop}) {
        auto in = test::input_for(tr, &m, p, {test::msg(0, 0, 1.0)}, {{0, {500, 200}, 300, 1e-3}});
        dp[p] = compute_metrics(run_simulation(in), static_cast<std::uint32_t>(pts.size())).delivery_probability;
    }
    for (std::size_t i = 1; i < pts.size(); ++i)
        shadowed += classify_receiver(m, {}, {}, 300, pts[0], pts[i]).loc == Loc::shadowed;
    const bool ok = shadowed == 10 && dp[ProtocolKind::hybrid_vehfog] == 1.0 && dp[ProtocolKind::fog_only] == 1.0 &&
                    dp[ProtocolKind::relay_multihop] == 0.0;
    report(4, ok, "all receivers shadowed, full fog coverage",
           "shadowed " + fmt("%.0f", shadowed) + "/10, hybrid " + fmt("%.3f", dp[ProtocolKind::hybrid_vehfog]) + ", fog_only " +
               fmt("%.3f", dp[ProtocolKind::fog_only]) + ", multi-hop " + fmt("%.3f", dp[ProtocolKind::relay_multihop]));
}

// Share of intended (message, receiver) pairs whose direct link is shadowed.
double shadowed_share(const Scenario& s, const SweepSpec& spec) {
    long total = 0, shadowed = 0;
    for (int n : spec.densities)
        for (std::uint64_t seed : spec.seeds) {
            const auto run = prepare_run(s, n, seed);
            for (const Message& msg : run.input.messages) {
                const auto& snap = run.trace->snapshots[run.trace->snapshot_index(msg.created_at)];
                const auto lt = build_link_table(run.input.radio, snap.vehicles, {});
                for (const Link& l : lt.adj[msg.origin]) {
                    if (l.dist > s.radio.range_m) continue;
                    ++total;
                    shadowed += l.loc == Loc::shadowed;
                }
            }
        }
    return total ? static_cast<double>(shadowed) / total : 0.0;
}

struct Additivity {
    bool ok = false;
    std::string detail;
};

Additivity sweep_criteria() {
    const Scenario s = load_scenario(kConfigs / "manhattan.cfg");
    const SweepSpec spec;  // densities 50..300, seeds 1..10, all protocols
    double worst_additivity = 0;
    long deliveries = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_sweep(s, spec, [&](const SweepRun&, const RunResult& r) {
        const auto scan = oracle::scan_logs(write_events_csv(r.log), write_hops_csv(r.log), write_frames_csv(r.log));
        worst_additivity = std::max(worst_additivity, scan.max_additivity_error);
        deliveries += scan.delivered;
    });
    const double secs = seconds_since(t0);
    const double share = shadowed_share(s, spec);

    std::map<std::pair<ProtocolKind, std::uint32_t>, std::vector<const ResultRow*>> by;
    for (const auto& r : res.rows) by[{r.protocol, r.n_vehicles}].push_back(&r);
    auto mean = [&](ProtocolKind p, std::uint32_t n, auto field) {
        double sum = 0;
        int k = 0;
        for (const ResultRow* r : by[{p, n}]) {
            const double v = field(r->report);
            if (std::isnan(v)) continue;
            sum += v;
            ++k;
        }
        return k ? sum / k : std::nan("");
    };
    auto delivery = [](const MetricsReport& m) { return m.delivery_probability; };
    auto delay = [](const MetricsReport& m) { return m.e2e_delay.mean; };
    auto collisions = [](const MetricsReport& m) { return m.collision_ratio; };
    using P = ProtocolKind;
    const bool complete = res.errors.empty() && res.rows.size() == 300;

    // 5: delivery ordering at every density.
    bool order = complete && share >= 0.30;
    std::string worst5;
    double margin5 = 1e9;
    for (int n : spec.densities) {
        const auto un = static_cast<std::uint32_t>(n);
        const std::pair<P, P> pairs[] = {{P::hybrid_vehfog, P::fog_only}, {P::fog_only, P::flooding},
                                         {P::hybrid_vehfog, P::cloud_relay}, {P::cloud_relay, P::relay_multihop}};
        for (auto [a, b] : pairs) {
            const double m = mean(a, un, delivery) - mean(b, un, delivery);
            if (m < margin5) {
                margin5 = m;
                worst5 = std::string(to_string(a)) + " - " + std::string(to_string(b)) + " at " + std::to_string(n);
            }
            order &= m >= 0;
        }
    }
    report(5, order && secs < 300, "delivery ordering on the shadowed grid",
           "shadowed share " + fmt("%.3f", share) + ", smallest margin " + fmt("%.4f", margin5) + " (" + worst5 + "), " +
               std::to_string(res.rows.size()) + " runs in " + fmt("%.1f", secs) + " s");

    // 6: cloud is slower than hybrid everywhere; delays grow with density.
    bool trend = complete;
    double margin6 = 1e9;
    for (int n : spec.densities) {
        const auto un = static_cast<std::uint32_t>(n);
        const double m = mean(P::cloud_relay, un, delay) - mean(P::hybrid_vehfog, un, delay);
        margin6 = std::min(margin6, m);
        trend &= m >= 0;
    }
    std::string rhos;
    for (P p : kAllProtocols) {
        std::vector<double> x, y;
        for (const auto& r : res.rows)
            if (r.protocol == p && !std::isnan(r.report.e2e_delay.mean)) {
                x.push_back(r.n_vehicles);
                y.push_back(r.report.e2e_delay.mean);
            }
        const double rho = spearman(x, y);
        trend &= rho >= 0;
        rhos += std::string(rhos.empty() ? "" : ", ") + std::string(to_string(p)) + " " + fmt("%.3f", rho);
    }
    report(6, trend, "delay trends", "cloud - hybrid mean delay >= " + fmt("%.5f", margin6) + " s; Spearman rho: " + rhos);

    // 7: flooding collides at least as often as hybrid at the top density.
    const double fc = mean(P::flooding, 300, collisions), hc = mean(P::hybrid_vehfog, 300, collisions);
    report(7, complete && fc >= hc, "collision ratio at density 300",
           "flooding " + fmt("%.4f", fc) + ", hybrid " + fmt("%.4f", hc));

    // 9 is reported after 8 to keep the output in order.
    return {complete && worst_additivity <= 1e-9 && deliveries > 0,
            std::to_string(deliveries) + " deliveries, worst |total - sum(hops)| = " + fmt("%.3g", worst_additivity) + " s"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cli_determinism() {
    const fs::path work = fs::temp_directory_path() / ("vehfog_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(work);
    std::string outputs[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
        const fs::path out = work / ("run" + std::to_string(k));
        const std::string cmd = std::string("\"") + VEHFOG_CLI + "\" sweep --config \"" + (kConfigs / "manhattan.cfg").string() +
                                "\" --jobs " + std::to_string(k + 1) + " --out-dir \"" + out.string() + "\" > /dev/null";
        ran &= std::system(cmd.c_str()) == 0;
        outputs[k] = slurp(out / "results.csv");
    }
    fs::remove_all(work);
    const bool ok = ran && !outputs[0].empty() && outputs[0] == outputs[1];
    report(8, ok, "two sweep executions give byte-identical results CSV",
           std::to_string(outputs[0].size()) + " bytes, " + (outputs[0] == outputs[1] ? "identical" : "different"));
}

void eq6_boundary() {
    const bool at = decide_mode_by_success(1.0, 1.0, 2) == Mode::multi_hop;
    const bool below = decide_mode_by_success(0.999, 1.0, 2) == Mode::fog;
    report(10, at && below, "success-rate threshold is inclusive at 0.5",
           std::string("M=0.5 -> ") + (at ? "multi_hop" : "fog") + ", M=0.4995 -> " + (below ? "fog" : "multi_hop"));
}

}  // namespace

int main() {
    formula_fidelity();
    geometry_oracle();
    degenerate_map();
    guaranteed_delivery();
    const Additivity add = sweep_criteria();
    cli_determinism();
    report(9, add.ok, "delay additivity over the sweep logs", add.detail);
    eq6_boundary();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
