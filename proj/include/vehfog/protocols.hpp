#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vehfog/network.hpp"

namespace vehfog {

using MessageId = std::uint32_t;

/// One critical message emitted by a vehicle.
struct Message {
    MessageId id = 0;
    VehicleId origin = 0;
    std::uint32_t size_bytes = 256;
    double created_at = 0.0;  // s
};

enum class ProtocolKind { hybrid_vehfog, flooding, relay_multihop, cloud_relay, fog_only };
enum class DecisionRule { per_receiver_shadowing, success_threshold };
enum class Mode { multi_hop, fog };

inline constexpr ProtocolKind kAllProtocols[] = {ProtocolKind::hybrid_vehfog, ProtocolKind::flooding,
                                                 ProtocolKind::relay_multihop, ProtocolKind::cloud_relay,
                                                 ProtocolKind::fog_only};

std::string_view to_string(ProtocolKind k);
std::optional<ProtocolKind> parse_protocol(std::string_view s);
std::string_view to_string(DecisionRule r);
std::optional<DecisionRule> parse_decision_rule(std::string_view s);

/// How a hop is carried: over the shared radio channel, through the cellular
/// cloud (fixed latency), or over the wired fog backhaul.
enum class Medium { radio, cellular, backhaul };

struct PathHop {
    NodeIndex node = 0;
    Medium medium = Medium::radio;
    friend bool operator==(const PathHop&, const PathHop&) = default;
};

enum class RouteKind { multi_hop, fog, cloud, flood, dropped_shadow, out_of_range };

/// Planned delivery of one message to one intended receiver. `path` lists the
/// nodes after the sender, ending at the target; empty for drops and floods.
struct ReceiverRoute {
    NodeIndex target = 0;
    RouteKind kind = RouteKind::multi_hop;
    std::vector<PathHop> path;
    friend bool operator==(const ReceiverRoute&, const ReceiverRoute&) = default;
};

struct DisseminationPlan {
    NodeIndex sender = 0;
    std::vector<ReceiverRoute> routes;  // one per intended receiver, ascending target
    bool flood = false;
    bool no_neighbors = false;  // "no nearby vehicles were located"
    std::optional<Mode> global_mode;
};

/// Inputs for the global message-success-rate decision.
struct SuccessRuleInputs {
    double predicted_hop_delay_s = 1.5e-3;
    double dmax_s = 0.1;
};

/// Everything planning needs, for one mobility snapshot. Non-owning.
struct DisseminationContext {
    const LinkTable* links = nullptr;
    std::span<const FogNode> fogs;
    double range_m = 300.0;
    DecisionRule rule = DecisionRule::per_receiver_shadowing;
    std::span<const std::uint8_t> gateways;  // per vehicle index, cloud_relay only
    SuccessRuleInputs success_rule{};
};

/// Intended receivers: vehicles within range_m of the sender, ascending.
std::vector<NodeIndex> intended_receivers(const DisseminationContext& ctx, NodeIndex sender);

DisseminationPlan hybrid_vehfog_disseminate(const DisseminationContext& ctx, NodeIndex sender);

/// Re-run the algorithm for vehicles that entered range after `previous` was
/// planned; receivers already in `previous` keep their decisions.
DisseminationPlan replan_new_vehicles(const DisseminationContext& ctx, NodeIndex sender,
                                      const DisseminationPlan& previous);

/// Greedy geographic forwarding. With `shadow_aware` only decodable, unshadowed
/// links are candidates; otherwise any vehicle within range is.
std::vector<ReceiverRoute> multi_hop_send(const DisseminationContext& ctx, NodeIndex sender,
                                          std::span<const NodeIndex> targets, bool shadow_aware = true);

std::vector<ReceiverRoute> fog_layer_send(const DisseminationContext& ctx, NodeIndex sender,
                                          std::span<const NodeIndex> targets);

DisseminationPlan flooding_disseminate(const DisseminationContext& ctx, NodeIndex sender);
DisseminationPlan relay_multihop_disseminate(const DisseminationContext& ctx, NodeIndex sender);
/// Receivers that decode the sender's broadcast take it directly; the rest go
/// sender -> gateway -> cloud -> gateway near the target -> target.
DisseminationPlan cloud_relay_disseminate(const DisseminationContext& ctx, NodeIndex sender);
DisseminationPlan fog_only_disseminate(const DisseminationContext& ctx, NodeIndex sender);

DisseminationPlan disseminate(ProtocolKind kind, const DisseminationContext& ctx, NodeIndex sender);

/// M = p_msg * d_norm / n_users, clamped to [0,1]; M >= 0.5 selects multi-hop.
Mode decide_mode_by_success(double p_msg, double d_norm, std::uint32_t n_users);
double message_success_rate(double p_msg, double d_norm, std::uint32_t n_users);

/// Fog nodes every `spacing` meters along the road, centred in each interval.
std::vector<FogNode> place_fog_nodes(double road_length, double spacing, double y, double coverage,
                                     double proc_delay_s);

}  // namespace vehfog
