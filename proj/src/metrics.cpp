#include "vehfog/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "vehfog/error.hpp"

namespace vehfog {

namespace {

// nearest-rank percentile on a sorted sample
double percentile(const std::vector<double>& sorted, double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

MetricsReport compute_metrics(const EventLog& log, std::uint32_t n_users, double dmax_s) {
    if (log.records.empty()) throw DomainError("compute_metrics: log has no intended receivers");
    MetricsReport rep;
    auto& c = rep.counts;
    std::vector<double> delays;
    for (const auto& r : log.records) {
        ++c.intended;
        switch (r.outcome) {
            case Outcome::delivered:
                ++c.delivered;
                delays.push_back(r.delay_total);
                break;
            case Outcome::collided: ++c.collided; break;
            case Outcome::dropped_shadow: ++c.dropped_shadow; break;
            case Outcome::out_of_range: ++c.out_of_range; break;
        }
    }
    c.frames_sent = log.frames.size();
    c.frames_collided = static_cast<std::uint64_t>(
        std::count_if(log.frames.begin(), log.frames.end(), [](const TxEvent& f) { return f.collided; }));

    rep.delivery_probability = static_cast<double>(c.delivered) / static_cast<double>(c.intended);
    rep.collision_ratio =
        c.frames_sent ? static_cast<double>(c.frames_collided) / static_cast<double>(c.frames_sent) : 0.0;

    if (delays.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rep.e2e_delay = {nan, nan, nan, nan};
        rep.m_success = 0.0;
    } else {
        std::sort(delays.begin(), delays.end());
        double sum = 0.0;
        for (double d : delays) sum += d;
        rep.e2e_delay.mean = sum / static_cast<double>(delays.size());
        rep.e2e_delay.p50 = percentile(delays, 0.50);
        rep.e2e_delay.p95 = percentile(delays, 0.95);
        rep.e2e_delay.max = delays.back();
        const double d_norm = std::clamp(rep.e2e_delay.mean / dmax_s, 0.0, 1.0);
        rep.m_success = rep.delivery_probability * d_norm / std::max<std::uint32_t>(n_users, 1);
    }
    return rep;
}

std::string write_report(const ResultRow& row) {
    const auto& r = row.report;
    std::ostringstream os;
    os << to_string(row.protocol) << ',' << row.n_vehicles << ',' << row.seed << ','
       << num(r.delivery_probability) << ',' << num(r.e2e_delay.mean) << ',' << num(r.e2e_delay.p95) << ','
       << num(r.collision_ratio) << ',' << num(r.m_success) << '\n';
    return os.str();
}

std::string results_csv(std::span<const ResultRow> rows) {
    std::string out = std::string(kResultsHeader) + "\n";
    for (const auto& r : rows) out += write_report(r);
    return out;
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.protocol != b.protocol) return a.protocol < b.protocol;
        if (a.n_vehicles != b.n_vehicles) return a.n_vehicles < b.n_vehicles;
        return a.seed < b.seed;
    });
}

std::map<std::string, std::string> plot_data(std::span<const ResultRow> rows) {
    struct Metric {
        const char* file;
        double (*get)(const MetricsReport&);
    };
    static const Metric metrics[] = {
        {"delivery_prob.dat", [](const MetricsReport& r) { return r.delivery_probability; }},
        {"delay_mean_s.dat", [](const MetricsReport& r) { return r.e2e_delay.mean; }},
        {"delay_p95_s.dat", [](const MetricsReport& r) { return r.e2e_delay.p95; }},
        {"collision_ratio.dat", [](const MetricsReport& r) { return r.collision_ratio; }},
        {"m_success.dat", [](const MetricsReport& r) { return r.m_success; }},
    };
    std::set<ProtocolKind> protocols;
    std::set<std::uint32_t> densities;
    for (const auto& r : rows) {
        protocols.insert(r.protocol);
        densities.insert(r.n_vehicles);
    }
    std::map<std::string, std::string> out;
    for (const Metric& m : metrics) {
        std::ostringstream os;
        os << "# n_vehicles";
        for (auto p : protocols) os << ' ' << to_string(p);
        os << '\n';
        for (auto n : densities) {
            os << n;
            for (auto p : protocols) {
                double sum = 0.0;
                std::size_t k = 0;
                for (const auto& r : rows)
                    if (r.protocol == p && r.n_vehicles == n) {
                        const double v = m.get(r.report);
                        if (!std::isnan(v)) {
                            sum += v;
                            ++k;
                        }
                    }
                os << ' ' << num(k ? sum / static_cast<double>(k) : std::numeric_limits<double>::quiet_NaN());
            }
            os << '\n';
        }
        out[m.file] = os.str();
    }
    return out;
}

}  // namespace vehfog
