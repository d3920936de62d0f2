#include "vehfog/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vehfog/error.hpp"

namespace vehfog {

std::string_view to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::hybrid_vehfog: return "hybrid_vehfog";
        case ProtocolKind::flooding: return "flooding";
        case ProtocolKind::relay_multihop: return "relay_multihop";
        case ProtocolKind::cloud_relay: return "cloud_relay";
        case ProtocolKind::fog_only: return "fog_only";
    }
    return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view s) {
    for (ProtocolKind k : kAllProtocols)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::string_view to_string(DecisionRule r) {
    return r == DecisionRule::per_receiver_shadowing ? "per_receiver_shadowing" : "success_threshold";
}

std::optional<DecisionRule> parse_decision_rule(std::string_view s) {
    if (s == "per_receiver_shadowing") return DecisionRule::per_receiver_shadowing;
    if (s == "success_threshold") return DecisionRule::success_threshold;
    return std::nullopt;
}

namespace {

const LinkTable& links_of(const DisseminationContext& ctx) {
    if (!ctx.links) throw std::logic_error("DisseminationContext without link table");
    return *ctx.links;
}

// Nearest fog node whose coverage contains `node`; ties go to the lower fog id.
std::optional<NodeIndex> covering_fog(const DisseminationContext& ctx, NodeIndex node) {
    const LinkTable& lt = links_of(ctx);
    std::optional<NodeIndex> best;
    double best_d = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    for (const Link& l : lt.adj[node]) {
        if (!lt.is_fog(l.to)) continue;
        const auto id = ctx.fogs[l.to - lt.vehicle_count].id;
        if (l.dist < best_d || (l.dist == best_d && id < best_id)) {
            best = l.to;
            best_d = l.dist;
            best_id = id;
        }
    }
    return best;
}

bool usable(const Link& l, const LinkTable& lt, bool shadow_aware) {
    if (lt.is_fog(l.to)) return false;
    return shadow_aware ? (l.decodable && l.loc == Loc::clear) : true;
}

ReceiverRoute greedy_route(const DisseminationContext& ctx, NodeIndex sender, NodeIndex target,
                           bool shadow_aware) {
    const LinkTable& lt = links_of(ctx);
    const Point goal = lt.positions[target];
    ReceiverRoute route{target, RouteKind::multi_hop, {}};
    NodeIndex cur = sender;
    while (cur != target) {
        double cur_d = distance(lt.positions[cur], goal);
        std::optional<NodeIndex> next;
        double next_d = cur_d;
        for (const Link& l : lt.adj[cur]) {
            if (!usable(l, lt, shadow_aware)) continue;
            const double d = l.to == target ? 0.0 : distance(lt.positions[l.to], goal);
            // strictly closer; rows are ascending so the first minimum has the lower id
            if (d < next_d) {
                next = l.to;
                next_d = d;
            }
        }
        if (!next || route.path.size() > lt.vehicle_count) {
            route.kind = RouteKind::out_of_range;
            route.path.clear();
            return route;
        }
        route.path.push_back({*next, Medium::radio});
        cur = *next;
    }
    return route;
}

RouteKind failure_kind(const LinkTable& lt, NodeIndex sender, NodeIndex target) {
    const Link* l = lt.find(sender, target);
    return (l && l->obstruction.n > 0) ? RouteKind::dropped_shadow : RouteKind::out_of_range;
}

void sort_routes(std::vector<ReceiverRoute>& routes) {
    std::sort(routes.begin(), routes.end(),
              [](const ReceiverRoute& a, const ReceiverRoute& b) { return a.target < b.target; });
}

}  // namespace

std::vector<NodeIndex> intended_receivers(const DisseminationContext& ctx, NodeIndex sender) {
    const LinkTable& lt = links_of(ctx);
    std::vector<NodeIndex> out;
    for (const Link& l : lt.adj[sender])
        if (!lt.is_fog(l.to) && l.dist <= ctx.range_m) out.push_back(l.to);
    return out;
}

std::vector<ReceiverRoute> multi_hop_send(const DisseminationContext& ctx, NodeIndex sender,
                                          std::span<const NodeIndex> targets, bool shadow_aware) {
    std::vector<ReceiverRoute> routes;
    routes.reserve(targets.size());
    for (NodeIndex t : targets) routes.push_back(greedy_route(ctx, sender, t, shadow_aware));
    return routes;
}

std::vector<ReceiverRoute> fog_layer_send(const DisseminationContext& ctx, NodeIndex sender,
                                          std::span<const NodeIndex> targets) {
    std::vector<ReceiverRoute> routes;
    routes.reserve(targets.size());
    const auto up = covering_fog(ctx, sender);
    for (NodeIndex t : targets) {
        const auto down = covering_fog(ctx, t);
        if (!up || !down) {
            routes.push_back({t, RouteKind::dropped_shadow, {}});
            continue;
        }
        ReceiverRoute r{t, RouteKind::fog, {{*up, Medium::radio}}};
        if (*down != *up) r.path.push_back({*down, Medium::backhaul});
        r.path.push_back({t, Medium::radio});
        routes.push_back(std::move(r));
    }
    return routes;
}

double message_success_rate(double p_msg, double d_norm, std::uint32_t n_users) {
    if (!(p_msg >= 0.0 && p_msg <= 1.0)) throw DomainError("decide_mode_by_success: probability outside [0,1]");
    if (n_users < 1) throw DomainError("decide_mode_by_success: need at least one user");
    if (!(d_norm >= 0.0)) throw DomainError("decide_mode_by_success: negative normalized delay");
    return std::clamp(p_msg * d_norm / static_cast<double>(n_users), 0.0, 1.0);
}

Mode decide_mode_by_success(double p_msg, double d_norm, std::uint32_t n_users) {
    return message_success_rate(p_msg, d_norm, n_users) >= 0.5 ? Mode::multi_hop : Mode::fog;
}

namespace {

DisseminationPlan hybrid_for(const DisseminationContext& ctx, NodeIndex sender,
                             std::span<const NodeIndex> receivers) {
    const LinkTable& lt = links_of(ctx);
    DisseminationPlan plan;
    plan.sender = sender;
    if (receivers.empty()) {
        plan.no_neighbors = true;
        return plan;
    }
    std::vector<NodeIndex> clear, shadowed;
    for (NodeIndex r : receivers) {
        const Link* l = lt.find(sender, r);
        (l && l->loc == Loc::shadowed ? shadowed : clear).push_back(r);
    }
    if (ctx.rule == DecisionRule::success_threshold) {
        const double p_msg = static_cast<double>(clear.size()) / static_cast<double>(receivers.size());
        const double d_norm = ctx.success_rule.predicted_hop_delay_s / ctx.success_rule.dmax_s;
        plan.global_mode = decide_mode_by_success(p_msg, d_norm, static_cast<std::uint32_t>(receivers.size()));
        if (*plan.global_mode == Mode::multi_hop) {
            plan.routes = multi_hop_send(ctx, sender, receivers);
        } else {
            plan.routes = fog_layer_send(ctx, sender, receivers);
        }
    } else {
        plan.routes = multi_hop_send(ctx, sender, clear);
        auto via_fog = fog_layer_send(ctx, sender, shadowed);
        plan.routes.insert(plan.routes.end(), via_fog.begin(), via_fog.end());
    }
    sort_routes(plan.routes);
    return plan;
}

}  // namespace

DisseminationPlan hybrid_vehfog_disseminate(const DisseminationContext& ctx, NodeIndex sender) {
    const auto receivers = intended_receivers(ctx, sender);
    return hybrid_for(ctx, sender, receivers);
}

DisseminationPlan replan_new_vehicles(const DisseminationContext& ctx, NodeIndex sender,
                                      const DisseminationPlan& previous) {
    std::vector<NodeIndex> fresh;
    for (NodeIndex r : intended_receivers(ctx, sender)) {
        const bool known = std::any_of(previous.routes.begin(), previous.routes.end(),
                                       [&](const ReceiverRoute& rr) { return rr.target == r; });
        if (!known) fresh.push_back(r);
    }
    return hybrid_for(ctx, sender, fresh);
}

DisseminationPlan flooding_disseminate(const DisseminationContext& ctx, NodeIndex sender) {
    DisseminationPlan plan;
    plan.sender = sender;
    plan.flood = true;
    for (NodeIndex r : intended_receivers(ctx, sender)) plan.routes.push_back({r, RouteKind::flood, {}});
    plan.no_neighbors = plan.routes.empty();
    return plan;
}

DisseminationPlan relay_multihop_disseminate(const DisseminationContext& ctx, NodeIndex sender) {
    DisseminationPlan plan;
    plan.sender = sender;
    const auto receivers = intended_receivers(ctx, sender);
    plan.no_neighbors = receivers.empty();
    plan.routes = multi_hop_send(ctx, sender, receivers, /*shadow_aware=*/false);
    return plan;
}

DisseminationPlan cloud_relay_disseminate(const DisseminationContext& ctx, NodeIndex sender) {
    const LinkTable& lt = links_of(ctx);
    DisseminationPlan plan;
    plan.sender = sender;
    const auto receivers = intended_receivers(ctx, sender);
    plan.no_neighbors = receivers.empty();
    auto is_gateway = [&](NodeIndex v) { return v < ctx.gateways.size() && ctx.gateways[v] != 0; };

    // Nearest gateway with a decodable link; rows ascend so ties keep the lower id.
    auto nearest_gateway = [&](NodeIndex v) -> std::optional<NodeIndex> {
        std::optional<NodeIndex> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (const Link& l : lt.adj[v])
            if (!lt.is_fog(l.to) && l.decodable && is_gateway(l.to) && l.dist < best_d) {
                best = l.to;
                best_d = l.dist;
            }
        return best;
    };

    const std::optional<NodeIndex> up = is_gateway(sender) ? std::optional(sender) : nearest_gateway(sender);
    for (NodeIndex t : receivers) {
        // The uplink frame is a local broadcast; receivers that decode it need no cloud leg.
        const Link* direct = lt.find(sender, t);
        if (direct && direct->decodable) {
            plan.routes.push_back({t, RouteKind::multi_hop, {{t, Medium::radio}}});
            continue;
        }
        if (!up) {
            plan.routes.push_back({t, failure_kind(lt, sender, t), {}});
            continue;
        }
        const std::optional<NodeIndex> down = is_gateway(t) ? std::optional(t) : nearest_gateway(t);
        if (!down) {
            plan.routes.push_back({t, failure_kind(lt, sender, t), {}});
            continue;
        }
        ReceiverRoute r{t, RouteKind::cloud, {}};
        if (*up != sender) r.path.push_back({*up, Medium::radio});
        r.path.push_back({*down, Medium::cellular});
        if (*down != t) r.path.push_back({t, Medium::radio});
        plan.routes.push_back(std::move(r));
    }
    return plan;
}

DisseminationPlan fog_only_disseminate(const DisseminationContext& ctx, NodeIndex sender) {
    DisseminationPlan plan;
    plan.sender = sender;
    const auto receivers = intended_receivers(ctx, sender);
    plan.no_neighbors = receivers.empty();
    plan.routes = fog_layer_send(ctx, sender, receivers);
    return plan;
}

DisseminationPlan disseminate(ProtocolKind kind, const DisseminationContext& ctx, NodeIndex sender) {
    switch (kind) {
        case ProtocolKind::hybrid_vehfog: return hybrid_vehfog_disseminate(ctx, sender);
        case ProtocolKind::flooding: return flooding_disseminate(ctx, sender);
        case ProtocolKind::relay_multihop: return relay_multihop_disseminate(ctx, sender);
        case ProtocolKind::cloud_relay: return cloud_relay_disseminate(ctx, sender);
        case ProtocolKind::fog_only: return fog_only_disseminate(ctx, sender);
    }
    throw std::logic_error("unknown protocol");
}

std::vector<FogNode> place_fog_nodes(double road_length, double spacing, double y, double coverage,
                                     double proc_delay_s) {
    if (!(spacing > 0.0)) throw DomainError("fog spacing must be positive");
    if (!(coverage > 0.0)) throw DomainError("fog coverage must be positive");
    std::vector<FogNode> out;
    for (double x = spacing / 2.0; x < road_length; x += spacing)
        out.push_back({static_cast<std::uint32_t>(out.size()), {x, y}, coverage, proc_delay_s});
    return out;
}

}  // namespace vehfog
