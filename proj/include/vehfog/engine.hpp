#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vehfog/protocols.hpp"

namespace vehfog {

/// Broadcast CSMA/CA parameters (802.11p control channel, no RTS/CTS, no ACK).
struct MacParams {
    double data_rate_bps = 2e6;
    int cw_min = 31;
    int cw_max = 1023;
    double slot_s = 13e-6;
    int max_attempts = 3;
    double proc_relay_s = 1e-4;
};

struct CloudParams {
    double rtt_s = 0.05;
    double gateway_fraction = 0.1;
};

struct FloodParams {
    double jitter_s = 5e-3;
};

/// Periodic background safety beacons; they occupy the channel but are not
/// counted as critical-message frames.
struct BeaconParams {
    bool enabled = false;
    double interval_s = 0.01;
    std::uint32_t size_bytes = 200;
};

/// Per-hop delay components in seconds; total is their sum.
struct HopDelay {
    double t_trans = 0.0;
    double t_q = 0.0;
    double t_cont = 0.0;
    double t_proc = 0.0;
    double t_prop = 0.0;
    double total = 0.0;
    friend bool operator==(const HopDelay&, const HopDelay&) = default;
};

double transmission_delay(double size_bytes, double rate_bps);
double propagation_delay(double d_m);
/// Upper backoff slot index for a retry: min((cw_min + 1) * 2^attempt - 1, cw_max).
int contention_window(int attempt, int cw_min, int cw_max);
double contention_delay(int attempt, const MacParams& mac, std::mt19937_64& rng);
HopDelay hop_delay(double t_trans, double t_q, double t_cont, double t_proc, double t_prop);

enum class Outcome { delivered, collided, dropped_shadow, out_of_range };
std::string_view to_string(Outcome o);

/// Vehicle or fog node as it appears in logs ("v12", "f3").
struct NodeRef {
    bool fog = false;
    std::uint32_t id = 0;
    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};
std::string to_string(NodeRef n);

/// Terminal outcome of one (message, intended receiver) pair.
struct OutcomeRecord {
    MessageId msg = 0;
    VehicleId receiver = 0;
    Outcome outcome = Outcome::out_of_range;
    double time = 0.0;  // delivery time, or when the failure became final
    double delay_total = 0.0;
    std::vector<HopDelay> hops;
    friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

/// One critical-message frame on the air (each retry is its own frame).
struct TxEvent {
    std::uint64_t frame_id = 0;
    NodeRef sender{};
    MessageId msg = 0;
    int attempt = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<NodeRef> receivers;
    bool collided = false;
    friend bool operator==(const TxEvent&, const TxEvent&) = default;
};

struct EventLog {
    std::vector<OutcomeRecord> records;  // ordered by (time, msg, receiver)
    std::vector<TxEvent> frames;         // ordered by frame id
    std::uint32_t no_neighbor_messages = 0;
    std::uint64_t beacon_frames = 0;
};

/// Everything one run needs. Pointers are non-owning and must outlive the call.
struct SimulationInput {
    const ObstacleMap* map = nullptr;  // null: obstacle-free
    const VehicleTrace* trace = nullptr;
    RadioEnv radio{};
    MacParams mac{};
    std::vector<FogNode> fogs;
    ProtocolKind protocol = ProtocolKind::hybrid_vehfog;
    DecisionRule rule = DecisionRule::per_receiver_shadowing;
    CloudParams cloud{};
    FloodParams flood{};
    BeaconParams beacon{};
    double dmax_s = 0.1;
    std::vector<Message> messages;
    std::uint64_t seed = 1;
};

/// Single-threaded deterministic run: equal inputs give identical logs.
EventLog run_simulation(const SimulationInput& input);

/// Deterministic gateway selection for cloud_relay (1 = gateway), per vehicle index.
std::vector<std::uint8_t> select_gateways(std::size_t vehicles, double fraction, std::uint64_t seed);

// CSV serialization. Times are seconds printed with nanosecond resolution.
std::string write_events_csv(const EventLog& log);  // msg_id,receiver,outcome,t_delivered,hops,delay_total
std::string write_hops_csv(const EventLog& log);    // msg_id,receiver,hop,t_trans,t_q,t_cont,t_proc,t_prop,total
std::string write_frames_csv(const EventLog& log);  // frame_id,sender,msg_id,attempt,t_start,t_end,receivers,collided
EventLog read_event_log(std::string_view events_csv, std::string_view hops_csv,
                        std::string_view frames_csv);

}  // namespace vehfog
