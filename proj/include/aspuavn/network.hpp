#pragma once

// The packet-handling stack that sits on the event kernel: flood relay,
// route replies, source-routed forwarding, alert propagation, and the
// attacker hooks. Protocol layers (routing, agents) drive it by injecting
// packets and running the clock forward.

#include "adversary.hpp"
#include "engine.hpp"
#include "transport.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace aspuavn
{

struct NetworkParams
{
    AttackConfig attack{};
    double discovery_timeout = 0.2; // s
    double probe_timeout = 0.2;     // s
};

struct DiscoveryState
{
    UavId src;
    UavId dst;
    double sent_at = 0.0;
    bool open = true;
    std::vector<DiscoveryCandidate> candidates;
};

class Network
{
public:
    Network(WorldConfig config, std::uint64_t seed, NetworkParams params = {})
        : world_(config, seed), params_(std::move(params)), adversary_rng_(seed, Stream::Adversary)
    {
        params_.attack.validate();
    }

    World& world() noexcept { return world_; }
    const World& world() const noexcept { return world_; }
    const NetworkParams& params() const noexcept { return params_; }
    NetworkParams& params() noexcept { return params_; }
    double clock() const noexcept { return world_.clock(); }
    double probe_timeout() const noexcept { return params_.probe_timeout; }
    double hop_delay() const noexcept { return world_.hop_delay(); }
    Trace& trace() noexcept { return world_.trace(); }
    bool blacklisted(UavId at, UavId uav) const { return world_.node(at).blacklisted(uav); }

    /// Attacks stay dormant until `at`; sinkholes start advertising then.
    void activate_attacks(double at)
    {
        attack_start_ = at;
        for (const auto& n : world_.nodes())
        {
            if (const auto* a = std::get_if<AttackerRole>(&n.role))
            {
                if (std::holds_alternative<Sinkhole>(a->kind))
                    world_.schedule(std::max(at, world_.clock()) + params_.attack.sh_advertise_period,
                                    AgentTimer{AgentTimerKind::SinkholeAdvertise, n.id, 0});
            }
        }
    }

    bool attacks_active() const noexcept { return world_.clock() >= attack_start_; }

    void run_until(double t) { world_.run(t, *this); }

    template <typename Stop>
    void run_until(double t, Stop&& stop)
    {
        world_.run(t, *this, std::forward<Stop>(stop));
    }

    std::uint64_t next_route_id() noexcept { return ++route_counter_; }
    std::uint64_t next_rreq_id(UavId) noexcept { return ++rreq_counter_; }

    // -- discovery bookkeeping -----------------------------------------------

    DiscoveryState& open_discovery(UavId src, UavId dst, std::uint64_t rreq_id)
    {
        auto& s = discoveries_[{src, rreq_id}];
        s.src = src;
        s.dst = dst;
        s.sent_at = world_.clock();
        return s;
    }

    DiscoveryState close_discovery(UavId src, std::uint64_t rreq_id)
    {
        auto it = discoveries_.find({src, rreq_id});
        if (it == discoveries_.end())
            return {};
        DiscoveryState s = std::move(it->second);
        discoveries_.erase(it);
        return s;
    }

    // -- probing ---------------------------------------------------------------

    /// Sends one Hello over `route`; returns false if the first hop is out of range.
    bool send_hello(const Route& route, std::uint32_t round)
    {
        auto& rec = probes_[{route.id, round}];
        rec = ProbeRecord{};
        rec.sent_at = world_.clock();
        world_.schedule(world_.clock() + params_.probe_timeout, ProbeTimeout{route.id, round});
        Packet p = source_routed(route.hops, Hello{route.id, round});
        return emit_source_routed(std::move(p)).arrivals > 0;
    }

    const ProbeRecord* probe(std::uint64_t route_id, std::uint32_t round) const
    {
        auto it = probes_.find({route_id, round});
        return it == probes_.end() ? nullptr : &it->second;
    }

    // -- watchdog --------------------------------------------------------------

    void begin_watch(std::uint64_t route_id, std::size_t intervals)
    {
        auto& w = watches_[route_id];
        w.clear();
        watch_intervals_[route_id] = intervals;
    }

    void send_test(const Route& route, std::uint32_t seq, std::uint32_t interval)
    {
        Packet p = source_routed(route.hops, Test{route.id, seq, interval});
        emit_source_routed(std::move(p));
    }

    std::map<UavId, WatchCounts> end_watch(std::uint64_t route_id)
    {
        auto it = watches_.find(route_id);
        std::map<UavId, WatchCounts> out;
        if (it != watches_.end())
        {
            out = std::move(it->second);
            watches_.erase(it);
        }
        watch_intervals_.erase(route_id);
        return out;
    }

    // -- data ------------------------------------------------------------------

    void send_data_packet(const Route& route, std::uint64_t seq, std::uint64_t session)
    {
        Packet p = source_routed(route.hops, Data{seq, kDataPayloadBytes, session});
        world_.trace().note(world_.clock(), TraceEvent::DataSent, route.src.value, route.dst.value,
                            static_cast<std::int64_t>(session));
        emit_source_routed(std::move(p));
    }

    std::uint64_t data_received(std::uint64_t session) const
    {
        auto it = data_received_.find(session);
        return it == data_received_.end() ? 0 : it->second;
    }

    std::uint64_t malicious_data_drops() const noexcept { return malicious_data_drops_; }

    // -- alerts ----------------------------------------------------------------

    /// Floods an Alert naming `bad`, starting at `from`.
    void flood_alert(UavId from, UavId bad)
    {
        apply_blacklist(from, bad);
        alert_seen_[from].insert(bad);
        Packet p;
        p.origin = from;
        p.timestamp = world_.clock();
        p.body = Alert{bad};
        world_.transmit(std::move(p), from, std::nullopt);
    }

    // -- event handler ---------------------------------------------------------

    void on_packet(World& w, const PacketArrival& a)
    {
        std::visit([&](const auto& body) { handle(w, a, body); }, a.packet.body);
    }

    void on_timer(World& w, const Event& e)
    {
        if (const auto* t = std::get_if<AgentTimer>(&e.kind))
        {
            if (t->kind == AgentTimerKind::SinkholeAdvertise)
                sinkhole_tick(w, t->node);
        }
        else if (const auto* pt = std::get_if<ProbeTimeout>(&e.kind))
        {
            auto it = probes_.find({pt->route_id, pt->probe_round});
            if (it != probes_.end() && !it->second.confirmed)
                w.trace().note(w.clock(), TraceEvent::ProbeTimeout, kNoNode, kNoNode,
                               static_cast<std::int64_t>(pt->route_id));
        }
    }

private:
    template <typename Body>
    Packet source_routed(const std::vector<UavId>& hops, Body body) const
    {
        Packet p;
        p.origin = hops.front();
        p.timestamp = world_.clock();
        p.path = hops;
        p.cursor = 0;
        p.body = std::move(body);
        return p;
    }

    /// Moves a source-routed packet one hop forward from path[cursor].
    TxResult emit_source_routed(Packet p)
    {
        const auto next = p.next_hop();
        if (!next)
            return {};
        const UavId from = p.path[p.cursor];
        ++p.cursor;
        return world_.transmit(std::move(p), from, *next);
    }

    const AttackKind* active_attack(const UavNode& n) const
    {
        if (!attacks_active())
            return nullptr;
        if (const auto* a = std::get_if<AttackerRole>(&n.role))
            return &a->kind;
        return nullptr;
    }

    void apply_blacklist(UavId at, UavId bad)
    {
        if (at == bad)
            return;
        UavNode& n = world_.node(at);
        if (n.blacklist.insert(bad).second)
        {
            n.table.erase_containing(bad);
            world_.trace().note(world_.clock(), TraceEvent::Blacklisted, at.value, bad.value);
        }
    }

    // RREQ ----------------------------------------------------------------------

    void handle(World& w, const PacketArrival& a, const Rreq& rreq)
    {
        UavNode& n = w.node(a.at);
        if (a.at == rreq.src)
            return;
        const bool tunnel_exit = !rreq.path_so_far.empty() && rreq.path_so_far.back() == a.at;
        if (!tunnel_exit &&
            std::find(rreq.path_so_far.begin(), rreq.path_so_far.end(), a.at) != rreq.path_so_far.end())
            return;
        if (a.at == rreq.dst)
        {
            answer_rreq(w, n, a.packet, rreq);
            return;
        }
        if (!n.rreq_cache.insert(rreq.id, a.packet.origin))
            return;

        if (tunnel_exit)
        {
            // Re-emitted as if the two tunnel ends were adjacent.
            Packet fwd = a.packet;
            w.transmit(std::move(fwd), a.at, std::nullopt);
            return;
        }

        if (const AttackKind* kind = active_attack(n))
        {
            if (std::holds_alternative<SelectiveForwarding>(*kind) ||
                std::holds_alternative<Sinkhole>(*kind))
            {
                auto& mem = memory_[a.at];
                const std::uint64_t seen = mem.highest_seq[rreq.dst];
                remember_rreq(mem, rreq, w.clock());
                Packet forged = sf_on_rreq(a.at, rreq, seen, params_.attack, w.clock());
                w.trace().note(w.clock(), TraceEvent::Forged, a.at.value, rreq.src.value,
                               static_cast<std::int64_t>(rreq.id));
                emit_source_routed(std::move(forged));
            }
            else if (const auto* wh = std::get_if<Wormhole>(kind))
            {
                if (w.exists(wh->peer) && wh->peer != a.at)
                {
                    Packet tunneled = a.packet;
                    tunneled.body = wh_tunnel_exit(rreq, a.at, wh->peer);
                    w.trace().note(w.clock(), TraceEvent::Tunneled, a.at.value, wh->peer.value,
                                   static_cast<std::int64_t>(rreq.id));
                    w.deliver_direct(std::move(tunneled), a.at, wh->peer, params_.attack.wh_tunnel_delay);
                }
            }
        }

        Rreq fwd = rreq;
        fwd.path_so_far.push_back(a.at);
        ++fwd.hop_count;
        Packet p = a.packet;
        p.body = std::move(fwd);
        w.transmit(std::move(p), a.at, std::nullopt);
    }

    void answer_rreq(World& w, UavNode& dst, const Packet& pkt, const Rreq& rreq)
    {
        const auto key = std::make_pair(pkt.origin, rreq.id);
        auto& answered = answered_[key];
        if (answered.empty() && !dst.rreq_cache.contains(rreq.id, pkt.origin))
        {
            dst.rreq_cache.insert(rreq.id, pkt.origin);
            dst.seq_no = std::max(dst.seq_no, rreq.dst_seq) + 1;
        }
        std::vector<UavId> route = rreq.path_so_far;
        route.push_back(dst.id);
        if (!acyclic(route) || answered.size() >= w.config().k_routes || answered.contains(route))
            return;
        answered.insert(route);

        Rrep rep;
        rep.route = route;
        rep.dst_seq = dst.seq_no;
        rep.hop_count = static_cast<std::uint32_t>(route.size() - 1);
        rep.rreq_id = rreq.id;
        Packet p;
        p.origin = dst.id;
        p.timestamp = w.clock();
        p.path.assign(route.rbegin(), route.rend());
        p.cursor = 0;
        p.body = std::move(rep);
        emit_source_routed(std::move(p));
    }

    // RREP ----------------------------------------------------------------------

    void handle(World& w, const PacketArrival& a, const Rrep& rep)
    {
        const Packet& pkt = a.packet;
        if (pkt.path.size() == 1)
        {
            learn_advertisement(w, a, rep);
            return;
        }
        if (pkt.cursor >= pkt.path.size() || pkt.path[pkt.cursor] != a.at)
            throw Error("RREP arrived off its reverse path");
        UavNode& n = w.node(a.at);
        if (pkt.at_last_hop())
        {
            accept_rrep(w, n, a, rep);
            return;
        }
        if (const AttackKind* kind = active_attack(n))
        {
            if (!std::holds_alternative<Wormhole>(*kind))
            {
                // Legitimate replies that would compete with forged ones are swallowed.
                w.trace().packet(w.clock(), TraceEvent::AttackDrop, a.at, pkt.sender.value,
                                 PacketKind::Rrep);
                return;
            }
            const auto& wh = std::get<Wormhole>(*kind);
            if (*pkt.next_hop() == wh.peer)
            {
                Packet fwd = pkt;
                ++fwd.cursor;
                w.trace().note(w.clock(), TraceEvent::Tunneled, a.at.value, wh.peer.value,
                               static_cast<std::int64_t>(rep.rreq_id));
                w.deliver_direct(std::move(fwd), a.at, wh.peer, params_.attack.wh_tunnel_delay);
                return;
            }
        }
        emit_source_routed(pkt);
    }

    void accept_rrep(World& w, UavNode& src, const PacketArrival& a, const Rrep& rep)
    {
        auto it = discoveries_.find({src.id, rep.rreq_id});
        if (it == discoveries_.end() || !it->second.open || rep.route.empty() ||
            rep.route.front() != src.id)
            return;
        for (auto h : rep.route)
        {
            if (src.blacklisted(h))
                return;
        }
        auto& st = it->second;
        for (auto& c : st.candidates)
        {
            if (c.route.hops == rep.route)
            {
                ++c.duplicates;
                return;
            }
        }
        DiscoveryCandidate c;
        c.route = make_route(next_route_id(), rep.route);
        c.dst_seq = rep.dst_seq;
        c.claimed_hops = rep.hop_count;
        c.rtt = w.clock() - st.sent_at;
        c.ssi = a.ssi;
        c.received_at = w.clock();
        st.candidates.push_back(std::move(c));
    }

    void learn_advertisement(World& w, const PacketArrival& a, const Rrep& rep)
    {
        UavNode& n = w.node(a.at);
        if (rep.route.empty() || std::find(rep.route.begin(), rep.route.end(), a.at) != rep.route.end())
            return;
        std::vector<UavId> hops{a.at};
        hops.insert(hops.end(), rep.route.begin(), rep.route.end());
        for (auto h : hops)
        {
            if (n.blacklisted(h))
                return;
        }
        RouteEntry e;
        e.route = make_route(next_route_id(), std::move(hops));
        e.discovered_at = w.clock();
        e.dst_seq = rep.dst_seq;
        e.claimed_hops = rep.hop_count + 1;
        e.advertised = true;
        e.stats.ssi = a.ssi;
        const UavId dst = e.route.dst;
        // Refresh rather than duplicate an identical advertised route.
        for (const auto& old : n.table.entries(a.at, dst))
        {
            if (old.route.hops == e.route.hops)
                e.route.id = old.route.id;
        }
        n.table.upsert(a.at, dst, std::move(e));
    }

    // Source-routed data plane --------------------------------------------------

    /// Common relay step for HELLO / CONFIRM / TEST / DATA at an intermediate.
    void relay(World& w, const PacketArrival& a)
    {
        const Packet& pkt = a.packet;
        UavNode& n = w.node(a.at);
        if (const AttackKind* kind = active_attack(n))
        {
            if (attacker_data_decision(*kind, pkt.next_hop(), adversary_rng_) == ForwardDecision::Drop)
            {
                w.trace().packet(w.clock(), TraceEvent::AttackDrop, a.at, pkt.sender.value, pkt.kind());
                if (pkt.kind() == PacketKind::Data)
                    ++malicious_data_drops_;
                return;
            }
        }
        emit_source_routed(pkt);
    }

    bool check_position(const PacketArrival& a) const
    {
        const Packet& pkt = a.packet;
        return pkt.cursor < pkt.path.size() && pkt.path[pkt.cursor] == a.at;
    }

    void handle(World& w, const PacketArrival& a, const Hello& hello)
    {
        if (!check_position(a))
            throw Error("HELLO arrived off its path");
        const Packet& pkt = a.packet;
        if (pkt.at_last_hop())
        {
            auto it = probes_.find({hello.route_id, hello.probe_round});
            if (it != probes_.end() && it->second.hello_delivered_at < 0.0)
                it->second.hello_delivered_at = w.clock();
            Packet c;
            c.origin = a.at;
            c.timestamp = w.clock();
            c.path.assign(pkt.path.rbegin(), pkt.path.rend());
            c.cursor = 0;
            c.body = Confirm{hello.route_id, hello.probe_round, pkt.timestamp};
            emit_source_routed(std::move(c));
            return;
        }
        relay(w, a);
    }

    void handle(World& w, const PacketArrival& a, const Confirm& confirm)
    {
        if (!check_position(a))
            throw Error("CONFIRM arrived off its path");
        if (a.packet.at_last_hop())
        {
            auto it = probes_.find({confirm.route_id, confirm.probe_round});
            if (it == probes_.end())
                return;
            if (it->second.confirmed)
                ++it->second.duplicates;
            else
            {
                it->second.confirmed = true;
                it->second.confirmed_at = w.clock();
            }
            return;
        }
        relay(w, a);
    }

    void handle(World& w, const PacketArrival& a, const Test& test)
    {
        if (!check_position(a))
            throw Error("TEST arrived off its path");
        const Packet& pkt = a.packet;
        auto wit = watches_.find(test.route_id);
        WatchCounts* counts = nullptr;
        if (wit != watches_.end())
        {
            counts = &wit->second[a.at];
            const std::size_t n = std::max<std::size_t>(watch_intervals_[test.route_id], test.interval + 1);
            for (auto* v : {&counts->received, &counts->forwarded, &counts->dropped})
            {
                if (v->size() < n)
                    v->resize(n, 0);
            }
            ++counts->received[test.interval];
        }
        if (pkt.at_last_hop())
            return;
        UavNode& n = w.node(a.at);
        if (const AttackKind* kind = active_attack(n))
        {
            if (attacker_data_decision(*kind, pkt.next_hop(), adversary_rng_) == ForwardDecision::Drop)
            {
                w.trace().packet(w.clock(), TraceEvent::AttackDrop, a.at, pkt.sender.value, pkt.kind());
                if (counts)
                    ++counts->dropped[test.interval];
                return;
            }
        }
        const TxResult tx = emit_source_routed(pkt);
        // Watchdog observers are any other node in radio range of the emitter.
        if (counts)
        {
            if (tx.audience > 0)
                ++counts->forwarded[test.interval];
            else
                ++counts->dropped[test.interval];
        }
    }

    void handle(World& w, const PacketArrival& a, const Data& data)
    {
        if (!check_position(a))
            throw Error("DATA arrived off its path");
        if (a.packet.at_last_hop())
        {
            ++data_received_[data.session];
            w.trace().note(w.clock(), TraceEvent::DataReceived, a.at.value, a.packet.origin.value,
                           static_cast<std::int64_t>(data.session));
            return;
        }
        relay(w, a);
    }

    void handle(World& w, const PacketArrival& a, const Alert& alert)
    {
        auto& seen = alert_seen_[a.at];
        if (!seen.insert(alert.blacklisted).second)
            return;
        apply_blacklist(a.at, alert.blacklisted);
        Packet fwd = a.packet;
        w.transmit(std::move(fwd), a.at, std::nullopt);
    }

    // Sinkhole ------------------------------------------------------------------

    void sinkhole_tick(World& w, UavId sh)
    {
        const UavNode& n = w.node(sh);
        const AttackKind* kind = active_attack(n);
        if (!kind || !std::holds_alternative<Sinkhole>(*kind))
            return;
        for (auto& p : sh_advertise(sh, memory_[sh], params_.attack, w.clock()))
        {
            w.trace().note(w.clock(), TraceEvent::Advertised, sh.value, std::get<Rrep>(p.body).route.back().value);
            w.transmit(std::move(p), sh, std::nullopt);
        }
        w.schedule(w.clock() + params_.attack.sh_advertise_period,
                   AgentTimer{AgentTimerKind::SinkholeAdvertise, sh, 0});
    }

    World world_;
    NetworkParams params_;
    Rng adversary_rng_;
    double attack_start_ = 0.0;
    std::uint64_t route_counter_ = 0;
    std::uint64_t rreq_counter_ = 0;
    std::uint64_t malicious_data_drops_ = 0;

    std::map<std::pair<UavId, std::uint64_t>, DiscoveryState> discoveries_;
    std::map<std::pair<UavId, std::uint64_t>, std::set<std::vector<UavId>>> answered_;
    std::map<std::pair<std::uint64_t, std::uint32_t>, ProbeRecord> probes_;
    std::map<std::uint64_t, std::map<UavId, WatchCounts>> watches_;
    std::map<std::uint64_t, std::size_t> watch_intervals_;
    std::map<std::uint64_t, std::uint64_t> data_received_;
    std::map<UavId, AttackerMemory> memory_;
    std::map<UavId, std::set<UavId>> alert_seen_;
};

} // namespace aspuavn
