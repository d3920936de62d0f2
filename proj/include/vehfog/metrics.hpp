#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vehfog/engine.hpp"

namespace vehfog {

struct DelayStats {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

struct OutcomeCounts {
    std::uint64_t intended = 0;
    std::uint64_t delivered = 0;
    std::uint64_t collided = 0;
    std::uint64_t dropped_shadow = 0;
    std::uint64_t out_of_range = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_collided = 0;
};

struct MetricsReport {
    double delivery_probability = 0.0;
    DelayStats e2e_delay{};  // over delivered pairs; NaN when nothing was delivered
    double collision_ratio = 0.0;
    double m_success = 0.0;
    OutcomeCounts counts{};
};

/// Throws DomainError when the log has no intended pairs.
MetricsReport compute_metrics(const EventLog& log, std::uint32_t n_users, double dmax_s = 0.1);

/// One line of the results table.
struct ResultRow {
    ProtocolKind protocol = ProtocolKind::hybrid_vehfog;
    std::uint32_t n_vehicles = 0;
    std::uint64_t seed = 0;
    MetricsReport report{};
};

inline constexpr const char* kResultsHeader =
    "protocol,n_vehicles,seed,delivery_prob,delay_mean_s,delay_p95_s,collision_ratio,m_success";

std::string write_report(const ResultRow& row);  // one CSV line with trailing newline
std::string results_csv(std::span<const ResultRow> rows);  // header + rows in the given order

/// Canonical row order: protocol, then density, then seed.
void sort_rows(std::vector<ResultRow>& rows);

/// Whitespace-separated mean curves, one file body per metric, keyed by file name.
std::map<std::string, std::string> plot_data(std::span<const ResultRow> rows);

}  // namespace vehfog
