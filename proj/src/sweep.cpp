#include "vehfog/sweep.hpp"

#include <omp.h>

#include "text_util.hpp"
#include "vehfog/error.hpp"

namespace vehfog {

SweepResult run_sweep(const Scenario& base, const SweepSpec& spec, const RunObserver& observer) {
    if (!base.trace_file.empty())
        throw ConfigError("key 'trace.file': a density sweep needs generated traffic");
    validate(base);

    std::vector<SweepRun> runs;
    for (ProtocolKind p : spec.protocols)
        for (int n : spec.densities)
            for (std::uint64_t seed : spec.seeds) runs.push_back({p, n, seed});

    std::vector<std::optional<ResultRow>> rows(runs.size());
    std::vector<std::string> errors(runs.size());
    const int threads = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(runs.size()); ++i) {
        const SweepRun& r = runs[i];
        try {
            Scenario s = base;
            s.protocol = r.protocol;
            PreparedRun prep = prepare_run(s, r.n_vehicles, r.seed);
            RunResult res;
            res.n_vehicles = static_cast<std::uint32_t>(prep.trace->vehicle_count());
            res.log = run_simulation(prep.input);
            res.report = compute_metrics(res.log, res.n_vehicles, s.dmax_s);
            rows[i] = ResultRow{r.protocol, res.n_vehicles, r.seed, res.report};
            if (observer) {
#pragma omp critical(vehfog_sweep_observer)
                observer(r, res);
            }
        } catch (const std::exception& e) {
            errors[i] = std::string(to_string(r.protocol)) + " n=" + std::to_string(r.n_vehicles) +
                        " seed=" + std::to_string(r.seed) + ": " + e.what();
        }
    }

    SweepResult out;
    for (auto& r : rows)
        if (r) out.rows.push_back(std::move(*r));
    for (auto& e : errors)
        if (!e.empty()) out.errors.push_back(std::move(e));
    sort_rows(out.rows);
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    const auto bad = [&] { return ConfigError("bad integer list '" + std::string(text) + "'"); };
    const auto parts = detail::split(text, ':');
    if (parts.size() == 3) {
        const auto lo = detail::parse_int<int>(detail::trim(parts[0]));
        const auto hi = detail::parse_int<int>(detail::trim(parts[1]));
        const auto step = detail::parse_int<int>(detail::trim(parts[2]));
        if (!lo || !hi || !step || *step <= 0 || *hi < *lo) throw bad();
        for (int v = *lo; v <= *hi; v += *step) out.push_back(v);
        return out;
    }
    if (parts.size() != 1) throw bad();
    for (auto item : detail::split(text, ',')) {
        const auto v = detail::parse_int<int>(detail::trim(item));
        if (!v) throw bad();
        out.push_back(*v);
    }
    if (out.empty()) throw bad();
    return out;
}

}  // namespace vehfog
