#pragma once

#include <cstdint>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "vehfog/metrics.hpp"
#include "vehfog/scenario.hpp"

namespace vehfog {

struct SweepSpec {
    std::vector<int> densities{50, 100, 150, 200, 250, 300};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<ProtocolKind> protocols{std::begin(kAllProtocols), std::end(kAllProtocols)};
    int jobs = 0;  // 0: OpenMP default
};

struct SweepRun {
    ProtocolKind protocol;
    int n_vehicles;
    std::uint64_t seed;
};

/// Called once per finished run, serialised; may inspect the full event log.
using RunObserver = std::function<void(const SweepRun&, const RunResult&)>;

struct SweepResult {
    std::vector<ResultRow> rows;  // sorted; failed runs are absent
    std::vector<std::string> errors;  // "protocol n=.. seed=..: message"
};

/// Runs every (protocol, density, seed) combination in parallel. Each run is
/// independent and deterministic, so the rows do not depend on `jobs`.
SweepResult run_sweep(const Scenario& base, const SweepSpec& spec, const RunObserver& observer = {});

std::vector<int> parse_int_list(std::string_view text);  // "50,100" or "50:300:50"

}  // namespace vehfog
