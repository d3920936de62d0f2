#include "vehfog/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <queue>
#include <sstream>
#include <variant>

#include "text_util.hpp"
#include "vehfog/error.hpp"

namespace vehfog {

namespace {
constexpr double kSpeedOfLight = 2.998e8;
}

double transmission_delay(double size_bytes, double rate_bps) {
    if (!(size_bytes > 0.0) || !(rate_bps > 0.0))
        throw DomainError("transmission_delay: size and rate must be positive");
    return size_bytes * 8.0 / rate_bps;
}

double propagation_delay(double d_m) {
    if (!(d_m >= 0.0)) throw DomainError("propagation_delay: negative distance");
    return d_m / kSpeedOfLight;
}

int contention_window(int attempt, int cw_min, int cw_max) {
    if (attempt < 0) throw DomainError("contention_window: negative attempt");
    long long w = cw_min + 1LL;
    for (int i = 0; i < attempt && w <= cw_max + 1LL; ++i) w *= 2;
    return static_cast<int>(std::min<long long>(w - 1, cw_max));
}

double contention_delay(int attempt, const MacParams& mac, std::mt19937_64& rng) {
    const int window = contention_window(attempt, mac.cw_min, mac.cw_max);
    std::uniform_int_distribution<int> slots(0, window);
    return slots(rng) * mac.slot_s;
}

HopDelay hop_delay(double t_trans, double t_q, double t_cont, double t_proc, double t_prop) {
    if (t_trans < 0.0 || t_q < 0.0 || t_cont < 0.0 || t_proc < 0.0 || t_prop < 0.0)
        throw DomainError("hop_delay: components must be non-negative");
    return {t_trans, t_q, t_cont, t_proc, t_prop, t_trans + t_q + t_cont + t_proc + t_prop};
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::delivered: return "delivered";
        case Outcome::collided: return "collided";
        case Outcome::dropped_shadow: return "dropped_shadow";
        case Outcome::out_of_range: return "out_of_range";
    }
    return "?";
}

std::string to_string(NodeRef n) { return (n.fog ? "f" : "v") + std::to_string(n.id); }

std::vector<std::uint8_t> select_gateways(std::size_t vehicles, double fraction, std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0x6a7e}};
    std::mt19937_64 rng(seq);
    std::bernoulli_distribution pick(std::clamp(fraction, 0.0, 1.0));
    std::vector<std::uint8_t> out(vehicles);
    for (auto& g : out) g = pick(rng) ? 1 : 0;
    return out;
}

namespace {

using Nanos = std::int64_t;

Nanos to_ns(double s) { return static_cast<Nanos>(std::llround(s * 1e9)); }
double to_s(Nanos ns) { return static_cast<double>(ns) / 1e9; }

struct HopNs {
    Nanos trans = 0, q = 0, cont = 0, proc = 0, prop = 0;
    Nanos total() const { return trans + q + cont + proc + prop; }
    HopDelay seconds() const {
        HopDelay h{to_s(trans), to_s(q), to_s(cont), to_s(proc), to_s(prop), to_s(total())};
        return h;
    }
};

constexpr std::uint32_t kNone = ~0u;

struct RouteRt {
    std::uint32_t pair = 0;
    std::vector<PathHop> path;
    std::size_t next = 0;
    std::vector<HopNs> hops;
};

struct PairRt {
    std::uint32_t msg = 0;  // index into messages
    NodeIndex target = 0;
    bool done = false;
    Outcome outcome = Outcome::out_of_range;
    bool has_reason = false;
    bool saw_collision = false;
    Nanos time = 0;
    std::vector<HopNs> hops;
};

struct MsgRt {
    Message msg;
    NodeIndex sender = 0;
    Nanos created = 0;
    bool flood = false;
    std::vector<std::uint32_t> pair_of_node;  // node -> pair index, flood only
    std::vector<std::uint8_t> has;            // flood only
    std::vector<std::vector<HopNs>> flood_hops;
    std::size_t snapshot = 0;
};

struct FrameRt {
    NodeIndex sender = 0;
    std::uint32_t msg = kNone;  // kNone for beacons
    bool flood = false;
    std::vector<std::uint32_t> routes;
    int attempt = 0;
    Nanos ready = 0, proc = 0, head = -1, start = 0, end = 0;
    std::size_t snapshot = 0;
    std::vector<HopNs> flood_hops;  // how the sender got a flooded message
};

struct NodeRt {
    std::deque<std::uint32_t> queue;
    bool busy = false;
    std::uint32_t current = kNone;
};

struct EvEmit { std::uint32_t msg; };
struct EvAttempt { NodeIndex node; };
struct EvTxEnd { std::uint32_t frame; };
struct EvArrive { NodeIndex node; std::vector<std::uint32_t> routes; };
struct EvFloodArrive { NodeIndex node; std::uint32_t msg; std::vector<HopNs> hops; };
struct EvForward { NodeIndex node; std::vector<std::uint32_t> routes; Nanos proc; };
struct EvFloodForward { NodeIndex node; std::uint32_t msg; Nanos proc; };
struct EvBeacon { NodeIndex node; };

using Payload = std::variant<EvEmit, EvAttempt, EvTxEnd, EvArrive, EvFloodArrive, EvForward,
                             EvFloodForward, EvBeacon>;

struct Event {
    Nanos time;
    std::uint64_t seq;
    Payload payload;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
};

class Simulator {
public:
    explicit Simulator(const SimulationInput& in);
    EventLog run();

private:
    void schedule(Nanos t, Payload p) { events_.push({t, seq_++, std::move(p)}); }

    const LinkTable& links_at(std::size_t snap);
    std::size_t snapshot_at(Nanos t) const { return in_.trace->snapshot_index(to_s(t)); }
    NodeRef ref(NodeIndex n) const {
        if (n < nv_) return {false, in_.trace->snapshots.front().vehicles[n].id};
        return {true, in_.fogs[n - nv_].id};
    }
    Nanos relay_proc(NodeIndex n) const {
        return n < nv_ ? to_ns(in_.mac.proc_relay_s) : to_ns(in_.fogs[n - nv_].proc_delay_s);
    }

    void on(const EvEmit& e, Nanos now);
    void on(const EvAttempt& e, Nanos now);
    void on(const EvTxEnd& e, Nanos now);
    void on(const EvArrive& e, Nanos now);
    void on(const EvFloodArrive& e, Nanos now);
    void on(const EvForward& e, Nanos now);
    void on(const EvFloodForward& e, Nanos now);
    void on(const EvBeacon& e, Nanos now);

    void enqueue(NodeIndex node, std::uint32_t frame, Nanos now, bool front = false);
    void start_head(NodeIndex node, Nanos now);
    Nanos backoff(int attempt) { return to_ns(contention_delay(attempt, in_.mac, mac_rng_)); }
    bool interfered(std::uint32_t frame, NodeIndex at, const LinkTable& now_links) const;
    void new_pair(std::uint32_t msg, NodeIndex target) {
        auto& p = pairs_.emplace_back();
        p.msg = msg;
        p.target = target;
    }
    void fail_pair(std::uint32_t pair, Outcome why, Nanos now);
    void deliver(std::uint32_t pair, std::vector<HopNs> hops, Nanos now);
    Nanos airtime(const FrameRt& f) const;

    const SimulationInput& in_;
    std::size_t nv_ = 0;
    std::size_t nodes_ = 0;
    std::map<std::size_t, LinkTable> link_cache_;
    std::vector<std::uint8_t> gateways_;

    std::priority_queue<Event, std::vector<Event>, Later> events_;
    std::uint64_t seq_ = 0;
    std::mt19937_64 mac_rng_;
    std::mt19937_64 flood_rng_;
    std::mt19937_64 beacon_rng_;

    std::vector<MsgRt> msgs_;
    std::vector<PairRt> pairs_;
    std::vector<RouteRt> routes_;
    std::vector<FrameRt> frames_;
    std::vector<NodeRt> node_rt_;
    std::vector<std::uint32_t> recent_;  // frames whose airtime may still overlap new ones
    Nanos max_air_ = 0;
    Nanos beacon_until_ = 0;
    Nanos last_time_ = 0;

    EventLog log_;
};

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
    std::seed_seq seq{seed, id};
    return std::mt19937_64(seq);
}

Simulator::Simulator(const SimulationInput& in)
    : in_(in), mac_rng_(stream(in.seed, 1)), flood_rng_(stream(in.seed, 2)), beacon_rng_(stream(in.seed, 3)) {
    if (!in_.trace || in_.trace->snapshots.empty()) throw ConfigError("simulation needs a non-empty trace");
    nv_ = in_.trace->vehicle_count();
    nodes_ = nv_ + in_.fogs.size();
    node_rt_.resize(nodes_);
    if (in_.map) {
        const Rect& b = in_.map->bounds();
        for (const auto& snap : in_.trace->snapshots)
            for (const auto& v : snap.vehicles)
                if (!b.contains(v.pos))
                    throw ConfigError("trace/map bound mismatch: vehicle " + std::to_string(v.id) +
                                      " at t=" + detail::format_double(snap.t) + " lies outside the map");
        for (const auto& f : in_.fogs)
            if (!b.contains(f.pos))
                throw ConfigError("fog node " + std::to_string(f.id) + " lies outside the map");
    }
    if (in_.protocol == ProtocolKind::cloud_relay)
        gateways_ = select_gateways(nv_, in_.cloud.gateway_fraction, in_.seed);
    const auto& first = in_.trace->snapshots.front().vehicles;
    for (const auto& m : in_.messages) {
        auto it = std::lower_bound(first.begin(), first.end(), m.origin,
                                   [](const VehicleState& v, VehicleId id) { return v.id < id; });
        if (it == first.end() || it->id != m.origin)
            throw ConfigError("message " + std::to_string(m.id) + " has unknown origin " + std::to_string(m.origin));
        if (m.size_bytes == 0) throw ConfigError("message size must be positive");
        if (m.created_at < 0.0) throw ConfigError("message emission time must be non-negative");
        MsgRt rt;
        rt.msg = m;
        rt.sender = static_cast<NodeIndex>(it - first.begin());
        rt.created = to_ns(m.created_at);
        msgs_.push_back(std::move(rt));
    }
}

const LinkTable& Simulator::links_at(std::size_t snap) {
    auto it = link_cache_.find(snap);
    if (it == link_cache_.end()) {
        RadioEnv env = in_.radio;
        env.map = in_.map;
        it = link_cache_.emplace(snap, build_link_table(env, in_.trace->snapshots[snap].vehicles, in_.fogs)).first;
    }
    return it->second;
}

Nanos Simulator::airtime(const FrameRt& f) const {
    const double bytes = f.msg == kNone ? in_.beacon.size_bytes : msgs_[f.msg].msg.size_bytes;
    return to_ns(transmission_delay(bytes, in_.mac.data_rate_bps));
}

EventLog Simulator::run() {
    for (std::uint32_t i = 0; i < msgs_.size(); ++i) schedule(msgs_[i].created, EvEmit{i});
    if (in_.beacon.enabled) {
        beacon_until_ = to_ns(in_.trace->snapshots.back().t);
        std::uniform_real_distribution<double> phase(0.0, in_.beacon.interval_s);
        for (NodeIndex v = 0; v < nv_; ++v) schedule(to_ns(phase(beacon_rng_)), EvBeacon{v});
    }
    while (!events_.empty()) {
        Event ev = events_.top();
        events_.pop();
        last_time_ = ev.time;
        std::visit([&](const auto& p) { on(p, ev.time); }, ev.payload);
    }

    for (std::uint32_t p = 0; p < pairs_.size(); ++p) {
        PairRt& pr = pairs_[p];
        if (pr.done) continue;
        // never delivered and never explicitly failed: classify from the direct link
        const MsgRt& m = msgs_[pr.msg];
        const Link* l = links_at(m.snapshot).find(m.sender, pr.target);
        pr.outcome = pr.saw_collision ? Outcome::collided
                     : (l && l->obstruction.n > 0) ? Outcome::dropped_shadow
                                                   : Outcome::out_of_range;
        pr.time = last_time_;
        pr.done = true;
    }

    log_.records.reserve(pairs_.size());
    for (const PairRt& pr : pairs_) {
        OutcomeRecord r;
        r.msg = msgs_[pr.msg].msg.id;
        r.receiver = ref(pr.target).id;
        r.outcome = pr.outcome;
        r.time = to_s(pr.time);
        if (pr.outcome == Outcome::delivered) {
            r.delay_total = to_s(pr.time - msgs_[pr.msg].created);
            for (const HopNs& h : pr.hops) r.hops.push_back(h.seconds());
        }
        log_.records.push_back(std::move(r));
    }
    std::stable_sort(log_.records.begin(), log_.records.end(), [](const OutcomeRecord& a, const OutcomeRecord& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.msg != b.msg) return a.msg < b.msg;
        return a.receiver < b.receiver;
    });
    return std::move(log_);
}

void Simulator::fail_pair(std::uint32_t pair, Outcome why, Nanos now) {
    PairRt& p = pairs_[pair];
    if (p.done) return;
    p.done = true;
    p.outcome = why;
    p.time = now;
}

void Simulator::deliver(std::uint32_t pair, std::vector<HopNs> hops, Nanos now) {
    PairRt& p = pairs_[pair];
    if (p.done) return;
    p.done = true;
    p.outcome = Outcome::delivered;
    p.time = now;
    p.hops = std::move(hops);
}

void Simulator::on(const EvEmit& e, Nanos now) {
    MsgRt& m = msgs_[e.msg];
    m.snapshot = snapshot_at(now);
    const LinkTable& lt = links_at(m.snapshot);

    DisseminationContext ctx;
    ctx.links = &lt;
    ctx.fogs = in_.fogs;
    ctx.range_m = in_.radio.range_m;
    ctx.rule = in_.rule;
    ctx.gateways = gateways_;
    ctx.success_rule.dmax_s = in_.dmax_s;
    ctx.success_rule.predicted_hop_delay_s = transmission_delay(m.msg.size_bytes, in_.mac.data_rate_bps) +
                                    0.5 * in_.mac.cw_min * in_.mac.slot_s + in_.mac.proc_relay_s +
                                    propagation_delay(in_.radio.range_m);

    const DisseminationPlan plan = disseminate(in_.protocol, ctx, m.sender);
    if (plan.no_neighbors) ++log_.no_neighbor_messages;

    if (plan.flood) {
        m.flood = true;
        m.has.assign(nodes_, 0);
        m.flood_hops.assign(nodes_, {});
        m.pair_of_node.assign(nodes_, kNone);
        for (const auto& r : plan.routes) {
            m.pair_of_node[r.target] = static_cast<std::uint32_t>(pairs_.size());
            new_pair(e.msg, r.target);
        }
        m.has[m.sender] = 1;
        if (!plan.routes.empty()) schedule(now, EvFloodForward{m.sender, e.msg, 0});
        return;
    }

    std::vector<std::uint32_t> live;
    for (const auto& r : plan.routes) {
        const auto pair = static_cast<std::uint32_t>(pairs_.size());
        new_pair(e.msg, r.target);
        switch (r.kind) {
            case RouteKind::dropped_shadow: fail_pair(pair, Outcome::dropped_shadow, now); break;
            case RouteKind::out_of_range: fail_pair(pair, Outcome::out_of_range, now); break;
            default:
                live.push_back(static_cast<std::uint32_t>(routes_.size()));
                routes_.push_back({pair, r.path, 0, {}});
        }
    }
    if (!live.empty()) schedule(now, EvForward{m.sender, std::move(live), 0});
}

void Simulator::on(const EvForward& e, Nanos now) {
    std::map<NodeIndex, std::vector<std::uint32_t>> radio_by_next;
    std::vector<std::uint32_t> radio_all;
    for (std::uint32_t r : e.routes) {
        RouteRt& rt = routes_[r];
        const PathHop& hop = rt.path[rt.next];
        switch (hop.medium) {
            case Medium::radio:
                radio_by_next[hop.node].push_back(r);
                radio_all.push_back(r);
                break;
            case Medium::cellular: {
                const Nanos rtt = to_ns(in_.cloud.rtt_s);
                rt.hops.push_back({0, 0, 0, e.proc, rtt});
                ++rt.next;
                schedule(now + rtt, EvArrive{hop.node, {r}});
                break;
            }
            case Medium::backhaul:
                rt.hops.push_back({0, 0, 0, e.proc, 0});
                ++rt.next;
                schedule(now, EvArrive{hop.node, {r}});
                break;
        }
    }
    if (radio_all.empty()) return;
    auto make_frame = [&](std::vector<std::uint32_t> routes) {
        FrameRt f;
        f.sender = e.node;
        f.msg = pairs_[routes_[routes.front()].pair].msg;
        f.routes = std::move(routes);
        f.ready = now;
        f.proc = e.proc;
        frames_.push_back(std::move(f));
        enqueue(e.node, static_cast<std::uint32_t>(frames_.size() - 1), now);
    };
    if (e.node >= nv_) {
        for (auto& [next, routes] : radio_by_next) make_frame(std::move(routes));  // fog: one frame per target
    } else {
        make_frame(std::move(radio_all));
    }
}

void Simulator::on(const EvFloodForward& e, Nanos now) {
    FrameRt f;
    f.sender = e.node;
    f.msg = e.msg;
    f.flood = true;
    f.ready = now;
    f.proc = e.proc;
    f.flood_hops = msgs_[e.msg].flood_hops[e.node];
    frames_.push_back(std::move(f));
    enqueue(e.node, static_cast<std::uint32_t>(frames_.size() - 1), now);
}

void Simulator::on(const EvBeacon& e, Nanos now) {
    if (now > beacon_until_) return;
    FrameRt f;
    f.sender = e.node;
    f.ready = now;
    frames_.push_back(std::move(f));
    enqueue(e.node, static_cast<std::uint32_t>(frames_.size() - 1), now);
    schedule(now + to_ns(in_.beacon.interval_s), EvBeacon{e.node});
}

void Simulator::enqueue(NodeIndex node, std::uint32_t frame, Nanos now, bool front) {
    NodeRt& n = node_rt_[node];
    if (front)
        n.queue.push_front(frame);
    else
        n.queue.push_back(frame);
    if (!n.busy) start_head(node, now);
}

void Simulator::start_head(NodeIndex node, Nanos now) {
    NodeRt& n = node_rt_[node];
    if (n.queue.empty()) return;
    n.current = n.queue.front();
    n.queue.pop_front();
    n.busy = true;
    FrameRt& f = frames_[n.current];
    if (f.head < 0) f.head = now;
    schedule(now + backoff(f.attempt), EvAttempt{node});
}

void Simulator::on(const EvAttempt& e, Nanos now) {
    NodeRt& n = node_rt_[e.node];
    FrameRt& f = frames_[n.current];
    const LinkTable& lt = links_at(snapshot_at(now));
    // Carrier sense: frames that started strictly earlier and are still on the air.
    Nanos busy_until = -1;
    for (std::uint32_t g : recent_) {
        const FrameRt& o = frames_[g];
        if (o.start < now && o.end > now && lt.hearable(o.sender, e.node)) busy_until = std::max(busy_until, o.end);
    }
    if (busy_until >= 0) {
        schedule(busy_until + backoff(f.attempt), EvAttempt{e.node});
        return;
    }
    f.start = now;
    f.end = now + airtime(f);
    f.snapshot = snapshot_at(now);
    max_air_ = std::max(max_air_, f.end - f.start);
    recent_.push_back(n.current);
    schedule(f.end, EvTxEnd{n.current});
}

bool Simulator::interfered(std::uint32_t frame, NodeIndex at, const LinkTable& now_links) const {
    const FrameRt& f = frames_[frame];
    for (std::uint32_t g : recent_) {
        if (g == frame) continue;
        const FrameRt& o = frames_[g];
        if (o.start < f.end && o.end > f.start && (o.sender == at || now_links.hearable(o.sender, at)))
            return true;
    }
    return false;
}

void Simulator::on(const EvTxEnd& e, Nanos now) {
    const std::uint32_t fid = e.frame;
    const NodeIndex sender = frames_[fid].sender;
    const LinkTable& tx_links = links_at(frames_[fid].snapshot);
    const LinkTable& now_links = links_at(snapshot_at(now));

    // recent_ keeps frames that can still overlap something not yet ended
    std::erase_if(recent_, [&](std::uint32_t g) { return frames_[g].end + max_air_ < now; });

    FrameRt& f = frames_[fid];
    const bool beacon = f.msg == kNone;
    TxEvent tx;
    if (!beacon) {
        tx.frame_id = log_.frames.size();
        tx.sender = ref(sender);
        tx.msg = msgs_[f.msg].msg.id;
        tx.attempt = f.attempt;
        tx.t_start = to_s(f.start);
        tx.t_end = to_s(f.end);
    }

    auto hop_for = [&](double dist) {
        return HopNs{f.end - f.start, f.head - f.ready, f.start - f.head, f.proc,
                     to_ns(propagation_delay(dist))};
    };

    bool any_collision = false;
    if (beacon) {
        ++log_.beacon_frames;
    } else if (f.flood) {
        MsgRt& m = msgs_[f.msg];
        bool retry = false;
        for (const Link& l : tx_links.adj[sender]) {
            if (tx_links.is_fog(l.to) || !l.decodable || m.has[l.to]) continue;
            tx.receivers.push_back(ref(l.to));
            if (interfered(fid, l.to, now_links)) {
                any_collision = true;
                retry = true;
                if (m.pair_of_node[l.to] != kNone) pairs_[m.pair_of_node[l.to]].saw_collision = true;
                continue;
            }
            auto hops = f.flood_hops;
            hops.push_back(hop_for(l.dist));
            const Nanos at = f.end + hops.back().prop;
            schedule(at, EvFloodArrive{l.to, f.msg, std::move(hops)});
        }
        if (retry && f.attempt + 1 < in_.mac.max_attempts) {
            FrameRt again = f;
            again.attempt += 1;
            frames_.push_back(std::move(again));
            node_rt_[sender].queue.push_front(static_cast<std::uint32_t>(frames_.size() - 1));
        }
    } else {
        std::map<NodeIndex, std::vector<std::uint32_t>> by_next;
        for (std::uint32_t r : f.routes) by_next[routes_[r].path[routes_[r].next].node].push_back(r);
        std::vector<std::uint32_t> collided_routes;
        for (auto& [next, routes] : by_next) {
            tx.receivers.push_back(ref(next));
            const Link* l = tx_links.find(sender, next);
            if (!l || !l->decodable) {
                const Outcome why = (l && l->obstruction.n > 0) ? Outcome::dropped_shadow : Outcome::out_of_range;
                for (std::uint32_t r : routes) fail_pair(routes_[r].pair, why, now);
                continue;
            }
            if (interfered(fid, next, now_links)) {
                any_collision = true;
                collided_routes.insert(collided_routes.end(), routes.begin(), routes.end());
                continue;
            }
            const HopNs hop = hop_for(l->dist);
            for (std::uint32_t r : routes) {
                routes_[r].hops.push_back(hop);
                ++routes_[r].next;
            }
            schedule(f.end + hop.prop, EvArrive{next, std::move(routes)});
        }
        if (!collided_routes.empty()) {
            if (f.attempt + 1 < in_.mac.max_attempts) {
                FrameRt again = f;
                again.attempt += 1;
                again.routes = std::move(collided_routes);
                frames_.push_back(std::move(again));
                node_rt_[sender].queue.push_front(static_cast<std::uint32_t>(frames_.size() - 1));
            } else {
                for (std::uint32_t r : collided_routes) {
                    pairs_[routes_[r].pair].saw_collision = true;
                    fail_pair(routes_[r].pair, Outcome::collided, now);
                }
            }
        }
    }
    if (!beacon) {
        tx.collided = any_collision;
        log_.frames.push_back(std::move(tx));
    }

    NodeRt& n = node_rt_[sender];
    n.busy = false;
    n.current = kNone;
    start_head(sender, now);
}

void Simulator::on(const EvArrive& e, Nanos now) {
    std::vector<std::uint32_t> onward;
    for (std::uint32_t r : e.routes) {
        RouteRt& rt = routes_[r];
        if (rt.next == rt.path.size())
            deliver(rt.pair, rt.hops, now);
        else
            onward.push_back(r);
    }
    if (!onward.empty()) {
        const Nanos proc = relay_proc(e.node);
        schedule(now + proc, EvForward{e.node, std::move(onward), proc});
    }
}

void Simulator::on(const EvFloodArrive& e, Nanos now) {
    MsgRt& m = msgs_[e.msg];
    if (m.has[e.node]) return;
    m.has[e.node] = 1;
    m.flood_hops[e.node] = e.hops;
    if (m.pair_of_node[e.node] != kNone) deliver(m.pair_of_node[e.node], e.hops, now);
    std::uniform_real_distribution<double> jitter(0.0, in_.flood.jitter_s);
    const Nanos proc = relay_proc(e.node) + to_ns(jitter(flood_rng_));
    schedule(now + proc, EvFloodForward{e.node, e.msg, proc});
}

// ---- CSV ------------------------------------------------------------------

std::string fmt_s(double s) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9f", s);
    return buf;
}

double parse_s(std::string_view v, std::size_t line) {
    const auto d = detail::parse_double(v);
    if (!d) throw ParseError(line, "bad number '" + std::string(v) + "'");
    return *d;
}

template <typename Int>
Int parse_i(std::string_view v, std::size_t line) {
    const auto d = detail::parse_int<Int>(v);
    if (!d) throw ParseError(line, "bad integer '" + std::string(v) + "'");
    return *d;
}

NodeRef parse_node(std::string_view v, std::size_t line) {
    if (v.size() < 2 || (v[0] != 'v' && v[0] != 'f')) throw ParseError(line, "bad node '" + std::string(v) + "'");
    return {v[0] == 'f', parse_i<std::uint32_t>(v.substr(1), line)};
}

}  // namespace

EventLog run_simulation(const SimulationInput& input) { return Simulator(input).run(); }

std::string write_events_csv(const EventLog& log) {
    std::ostringstream os;
    os << "msg_id,receiver,outcome,t_delivered,hops,delay_total\n";
    for (const auto& r : log.records) {
        os << r.msg << ',' << r.receiver << ',' << to_string(r.outcome) << ',';
        if (r.outcome == Outcome::delivered) os << fmt_s(r.time);
        os << ',' << r.hops.size() << ',';
        if (r.outcome == Outcome::delivered) os << fmt_s(r.delay_total);
        os << '\n';
    }
    return os.str();
}

std::string write_hops_csv(const EventLog& log) {
    std::ostringstream os;
    os << "msg_id,receiver,hop,t_trans,t_q,t_cont,t_proc,t_prop,total\n";
    for (const auto& r : log.records)
        for (std::size_t h = 0; h < r.hops.size(); ++h) {
            const HopDelay& d = r.hops[h];
            os << r.msg << ',' << r.receiver << ',' << h << ',' << fmt_s(d.t_trans) << ',' << fmt_s(d.t_q)
               << ',' << fmt_s(d.t_cont) << ',' << fmt_s(d.t_proc) << ',' << fmt_s(d.t_prop) << ','
               << fmt_s(d.total) << '\n';
        }
    return os.str();
}

std::string write_frames_csv(const EventLog& log) {
    std::ostringstream os;
    os << "frame_id,sender,msg_id,attempt,t_start,t_end,receivers,collided\n";
    for (const auto& f : log.frames) {
        os << f.frame_id << ',' << to_string(f.sender) << ',' << f.msg << ',' << f.attempt << ','
           << fmt_s(f.t_start) << ',' << fmt_s(f.t_end) << ',';
        for (std::size_t i = 0; i < f.receivers.size(); ++i) os << (i ? ";" : "") << to_string(f.receivers[i]);
        os << ',' << (f.collided ? 1 : 0) << '\n';
    }
    return os.str();
}

EventLog read_event_log(std::string_view events_csv, std::string_view hops_csv, std::string_view frames_csv) {
    EventLog log;
    std::map<std::pair<MessageId, VehicleId>, std::size_t> index;
    const auto ev = detail::lines_of(events_csv);
    if (ev.empty() || detail::trim(ev[0]) != "msg_id,receiver,outcome,t_delivered,hops,delay_total")
        throw ParseError(1, "bad events header");
    for (std::size_t i = 1; i < ev.size(); ++i) {
        const auto f = detail::split(detail::trim(ev[i]), ',');
        if (f.size() != 6) throw ParseError(i + 1, "expected 6 fields");
        OutcomeRecord r;
        r.msg = parse_i<MessageId>(f[0], i + 1);
        r.receiver = parse_i<VehicleId>(f[1], i + 1);
        const std::string_view oc = f[2];
        if (oc == "delivered") r.outcome = Outcome::delivered;
        else if (oc == "collided") r.outcome = Outcome::collided;
        else if (oc == "dropped_shadow") r.outcome = Outcome::dropped_shadow;
        else if (oc == "out_of_range") r.outcome = Outcome::out_of_range;
        else throw ParseError(i + 1, "unknown outcome '" + std::string(oc) + "'");
        if (r.outcome == Outcome::delivered) {
            r.time = parse_s(f[3], i + 1);
            r.delay_total = parse_s(f[5], i + 1);
        }
        r.hops.resize(parse_i<std::size_t>(f[4], i + 1));
        index[{r.msg, r.receiver}] = log.records.size();
        log.records.push_back(std::move(r));
    }
    const auto hp = detail::lines_of(hops_csv);
    if (hp.empty() || detail::trim(hp[0]) != "msg_id,receiver,hop,t_trans,t_q,t_cont,t_proc,t_prop,total")
        throw ParseError(1, "bad hops header");
    for (std::size_t i = 1; i < hp.size(); ++i) {
        const auto f = detail::split(detail::trim(hp[i]), ',');
        if (f.size() != 9) throw ParseError(i + 1, "expected 9 fields");
        const auto it = index.find({parse_i<MessageId>(f[0], i + 1), parse_i<VehicleId>(f[1], i + 1)});
        const auto h = parse_i<std::size_t>(f[2], i + 1);
        if (it == index.end() || h >= log.records[it->second].hops.size())
            throw ParseError(i + 1, "hop row without matching event");
        log.records[it->second].hops[h] = {parse_s(f[3], i + 1), parse_s(f[4], i + 1), parse_s(f[5], i + 1),
                                           parse_s(f[6], i + 1), parse_s(f[7], i + 1), parse_s(f[8], i + 1)};
    }
    const auto fr = detail::lines_of(frames_csv);
    if (fr.empty() || detail::trim(fr[0]) != "frame_id,sender,msg_id,attempt,t_start,t_end,receivers,collided")
        throw ParseError(1, "bad frames header");
    for (std::size_t i = 1; i < fr.size(); ++i) {
        const auto f = detail::split(detail::trim(fr[i]), ',');
        if (f.size() != 8) throw ParseError(i + 1, "expected 8 fields");
        TxEvent t;
        t.frame_id = parse_i<std::uint64_t>(f[0], i + 1);
        t.sender = parse_node(f[1], i + 1);
        t.msg = parse_i<MessageId>(f[2], i + 1);
        t.attempt = parse_i<int>(f[3], i + 1);
        t.t_start = parse_s(f[4], i + 1);
        t.t_end = parse_s(f[5], i + 1);
        if (!f[6].empty())
            for (auto part : detail::split(f[6], ';')) t.receivers.push_back(parse_node(part, i + 1));
        t.collided = parse_i<int>(f[7], i + 1) != 0;
        log.frames.push_back(std::move(t));
    }
    return log;
}

}  // namespace vehfog
