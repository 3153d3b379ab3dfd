#pragma once

// Deterministic discrete-event kernel: clock, event queue, node placement,
// unit-disk channel with a fixed per-hop delay, and the event loop.

#include "domain.hpp"
#include "mobility.hpp"
#include "rng.hpp"
#include "routing_table.hpp"
#include "trace.hpp"

#include <array>
#include <concepts>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

namespace aspuavn
{

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

struct PacketArrival
{
    Packet packet;
    UavId at;
    double ssi = 0.0; // signal index observed by the receiver
};

struct MobilityTick
{
};

enum class AgentTimerKind : std::uint8_t
{
    SinkholeAdvertise,
    Generic,
};

struct AgentTimer
{
    AgentTimerKind kind = AgentTimerKind::Generic;
    UavId node;
    std::uint64_t context = 0;
};

struct ProbeTimeout
{
    std::uint64_t route_id = 0;
    std::uint32_t probe_round = 0;
};

struct ScenarioEnd
{
};

using EventKind = std::variant<PacketArrival, MobilityTick, AgentTimer, ProbeTimeout, ScenarioEnd>;

struct Event
{
    double time = 0.0;
    std::uint64_t sequence = 0;
    EventKind kind;
};

/// Min-queue on (time, insertion sequence); equal times pop in FIFO order.
class EventQueue
{
public:
    std::uint64_t push(double time, EventKind kind)
    {
        const std::uint64_t seq = next_sequence_++;
        heap_.push(Event{time, seq, std::move(kind)});
        return seq;
    }

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    const Event& top() const { return heap_.top(); }

    Event pop()
    {
        Event e = std::move(const_cast<Event&>(heap_.top()));
        heap_.pop();
        return e;
    }

private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            if (a.time != b.time)
                return a.time > b.time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
};

// ---------------------------------------------------------------------------
// Nodes and world
// ---------------------------------------------------------------------------

struct NodeCounters
{
    std::uint64_t tx = 0;
    std::uint64_t rx = 0;
    std::uint64_t dropped = 0;
};

struct UavNode
{
    UavId id;
    NodeRole role = NormalRole{};
    Position3 position;
    StState mobility;
    RoutingTable table;
    RreqCache rreq_cache;
    std::set<UavId> blacklist;
    std::uint64_t seq_no = 0;
    NodeCounters counters;

    bool blacklisted(UavId u) const { return blacklist.contains(u); }
};

struct WorldConfig
{
    Box bounds{{0.0, 0.0, 0.0}, {1000.0, 1000.0, 100.0}};
    double range = 30.0;       // m
    double hop_delay = 0.005;  // s
    double tick = 0.1;         // s between mobility updates
    MobilityParams mobility{};
    bool mobile = true;
    bool packet_trace = true;
    std::size_t k_routes = kDefaultCandidateRoutes;
};

/// Uniform placement conditioned on the point count (a homogeneous Poisson
/// process given n points).
inline std::vector<Position3> place_nodes_ppp(std::size_t count, const Box& bounds, Rng& rng)
{
    if (count == 0)
        throw ConfigError("node_count", "must be at least 1");
    const Vec3 e = bounds.extent();
    if (!(e.x > 0.0 && e.y > 0.0 && e.z > 0.0))
        throw ConfigError("bounds", "topology box has zero volume");
    std::vector<Position3> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const double x = rng.uniform(bounds.min.x, bounds.max.x);
        const double y = rng.uniform(bounds.min.y, bounds.max.y);
        const double z = rng.uniform(bounds.min.z, bounds.max.z);
        out.push_back({x, y, z});
    }
    return out;
}

struct TxResult
{
    std::size_t arrivals = 0;
    std::size_t audience = 0; // nodes other than the sender within range
};

class World;

template <typename H>
concept EventHandler = requires(H h, World& w, const PacketArrival& a, const Event& e) {
    h.on_packet(w, a);
    h.on_timer(w, e);
};

class World
{
public:
    World(WorldConfig config, std::uint64_t seed)
        : config_(config), seed_(seed), mobility_rng_(seed, Stream::Mobility),
          trace_(config.packet_trace)
    {
        if (!(config_.range > 0.0))
            throw ConfigError("range", "must be positive");
        if (!(config_.hop_delay >= 0.0))
            throw ConfigError("hop_delay", "must be non-negative");
        if (!(config_.tick > 0.0))
            throw ConfigError("tick", "must be positive");
    }

    World(const World&) = delete;
    World& operator=(const World&) = delete;

    const WorldConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double clock() const noexcept { return clock_; }
    double range() const noexcept { return config_.range; }
    double hop_delay() const noexcept { return config_.hop_delay; }

    UavId add_node(Position3 pos, NodeRole role = NormalRole{})
    {
        if (!pos.finite())
            throw ConfigError("position", "non-finite coordinate");
        UavNode n;
        n.id = UavId{static_cast<std::uint32_t>(nodes_.size())};
        n.role = std::move(role);
        n.position = pos;
        n.table.set_capacity(config_.k_routes);
        n.mobility = initial_st_state(pos, mobility_rng_, config_.mobility);
        nodes_.push_back(std::move(n));
        return nodes_.back().id;
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    bool exists(UavId id) const noexcept { return id.value < nodes_.size(); }

    UavNode& node(UavId id)
    {
        if (!exists(id))
            throw Error("unknown UAV " + std::to_string(id.value));
        return nodes_[id.value];
    }
    const UavNode& node(UavId id) const
    {
        if (!exists(id))
            throw Error("unknown UAV " + std::to_string(id.value));
        return nodes_[id.value];
    }
    std::vector<UavNode>& nodes() noexcept { return nodes_; }
    const std::vector<UavNode>& nodes() const noexcept { return nodes_; }

    TopologySnapshot snapshot() const
    {
        TopologySnapshot s;
        s.positions.reserve(nodes_.size());
        for (const auto& n : nodes_)
            s.positions.push_back(n.position);
        return s;
    }

    bool in_range(UavId a, UavId b) const
    {
        return distance(node(a).position, node(b).position) <= config_.range;
    }

    /// Nodes other than `id` within range, in id order.
    std::vector<UavId> neighbors(UavId id) const
    {
        const Position3 p = node(id).position;
        std::vector<UavId> out;
        for (const auto& n : nodes_)
        {
            if (n.id != id && distance(p, n.position) <= config_.range)
                out.push_back(n.id);
        }
        return out;
    }

    EventQueue& queue() noexcept { return queue_; }
    Trace& trace() noexcept { return trace_; }
    const Trace& trace() const noexcept { return trace_; }

    std::uint64_t schedule(double at, EventKind kind)
    {
        if (!(at >= clock_) || !std::isfinite(at))
            throw ContractViolation("event scheduled in the past or at non-finite time");
        return queue_.push(at, std::move(kind));
    }

    /// Sends `packet` from `from`. Unicast to an out-of-range node is logged
    /// as a drop; broadcast reaches every current neighbor.
    TxResult transmit(Packet packet, UavId from, std::optional<UavId> to)
    {
        UavNode& sender = node(from);
        packet.sender = from;
        packet.tx_power = tx_power_for(sender.role);
        ++sender.counters.tx;
        ++tx_by_kind_[static_cast<std::size_t>(packet.kind())];
        const PacketKind kind = packet.kind();
        trace_.packet(clock_, TraceEvent::Tx, from, to ? to->value : kBroadcast, kind);

        TxResult res;
        const double arrive = clock_ + config_.hop_delay;
        for (const auto& n : nodes_)
        {
            if (n.id == from)
                continue;
            const double d = distance(sender.position, n.position);
            if (d <= config_.range)
                ++res.audience;
        }
        if (to)
        {
            if (!exists(*to))
            {
                trace_.packet(clock_, TraceEvent::OutOfRange, from, to->value, kind);
                return res;
            }
            const double d = distance(sender.position, node(*to).position);
            if (*to == from || d > config_.range)
            {
                ++sender.counters.dropped;
                trace_.packet(clock_, TraceEvent::OutOfRange, from, to->value, kind);
                return res;
            }
            const double ssi = received_ssi(packet.tx_power, d);
            schedule(arrive, PacketArrival{std::move(packet), *to, ssi});
            res.arrivals = 1;
            return res;
        }
        for (const auto& n : nodes_)
        {
            if (n.id == from)
                continue;
            const double d = distance(sender.position, n.position);
            if (d <= config_.range)
            {
                schedule(arrive, PacketArrival{packet, n.id, received_ssi(packet.tx_power, d)});
                ++res.arrivals;
            }
        }
        return res;
    }

    /// Out-of-band delivery (wormhole tunnel): ignores range.
    void deliver_direct(Packet packet, UavId from, UavId to, double delay)
    {
        packet.sender = from;
        packet.tx_power = tx_power_for(node(from).role);
        const double ssi = packet.tx_power;
        schedule(clock_ + delay, PacketArrival{std::move(packet), to, ssi});
    }

    std::uint64_t transmissions(PacketKind k) const noexcept
    {
        return tx_by_kind_[static_cast<std::size_t>(k)];
    }

    std::uint64_t control_transmissions() const noexcept
    {
        std::uint64_t n = 0;
        for (auto k : {PacketKind::Rreq, PacketKind::Rrep, PacketKind::Hello, PacketKind::Confirm,
                       PacketKind::Alert})
            n += transmissions(k);
        return n;
    }

    void start_mobility()
    {
        if (config_.mobile && !mobility_started_)
        {
            mobility_started_ = true;
            schedule(clock_ + config_.tick, MobilityTick{});
        }
    }

    /// Moves every non-ground-station node by one tick.
    void advance_positions(double dt)
    {
        for (auto& n : nodes_)
        {
            if (std::holds_alternative<GroundStationRole>(n.role))
                continue;
            auto [pos, st] = st_step(n.position, n.mobility, dt, mobility_rng_, config_.mobility,
                                     &config_.bounds);
            n.position = pos;
            n.mobility = st;
        }
    }

    /// Processes events in (time, sequence) order until the queue is empty,
    /// the next event lies beyond `until`, or `stop()` returns true. The
    /// clock is left at `until` unless stopped early.
    template <EventHandler H, typename Stop>
    void run(double until, H& handler, Stop&& stop)
    {
        if (until < clock_)
            throw ContractViolation("run: horizon precedes the clock");
        while (!queue_.empty() && queue_.top().time <= until)
        {
            Event ev = queue_.pop();
            clock_ = ev.time;
            dispatch(ev, handler);
            if (stop())
                return;
        }
        clock_ = until;
    }

    template <EventHandler H>
    void run(double until, H& handler)
    {
        run(until, handler, [] { return false; });
    }

private:
    template <EventHandler H>
    void dispatch(Event& ev, H& handler)
    {
        try
        {
            if (auto* a = std::get_if<PacketArrival>(&ev.kind))
            {
                if (!exists(a->at) || !exists(a->packet.sender))
                {
                    trace_.note(clock_, TraceEvent::MalformedEvent, a->at.value, a->packet.sender.value);
                    return;
                }
                UavNode& rx = nodes_[a->at.value];
                if (rx.blacklisted(a->packet.sender))
                {
                    ++rx.counters.dropped;
                    trace_.packet(clock_, TraceEvent::BlacklistDrop, a->at, a->packet.sender.value,
                                  a->packet.kind());
                    return;
                }
                ++rx.counters.rx;
                trace_.packet(clock_, TraceEvent::Delivered, a->at, a->packet.sender.value,
                              a->packet.kind());
                handler.on_packet(*this, *a);
            }
            else if (std::holds_alternative<MobilityTick>(ev.kind))
            {
                advance_positions(config_.tick);
                schedule(clock_ + config_.tick, MobilityTick{});
            }
            else if (std::holds_alternative<ScenarioEnd>(ev.kind))
            {
                trace_.note(clock_, TraceEvent::RunEnd, kNoNode, kNoNode);
            }
            else
            {
                handler.on_timer(*this, ev);
            }
        }
        catch (const Error& e)
        {
            trace_.note(clock_, TraceEvent::MalformedEvent, kNoNode, kNoNode, 0, e.what());
        }
    }

    WorldConfig config_;
    std::uint64_t seed_;
    Rng mobility_rng_;
    double clock_ = 0.0;
    EventQueue queue_;
    std::vector<UavNode> nodes_;
    Trace trace_;
    std::array<std::uint64_t, 7> tx_by_kind_{};
    bool mobility_started_ = false;
};

/// Handler that ignores every event; handy for exercising the kernel alone.
struct NullHandler
{
    std::vector<PacketArrival> received;
    void on_packet(World&, const PacketArrival& a) { received.push_back(a); }
    void on_timer(World&, const Event&) {}
};

} // namespace aspuavn
