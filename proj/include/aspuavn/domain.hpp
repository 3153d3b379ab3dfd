#pragma once

// Core value types shared by every layer of the simulator: identities,
// geometry, node roles, packets, routes and measured route statistics.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace aspuavn
{

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Raised when a scenario or component is configured with invalid values.
struct ConfigError : Error
{
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a caller breaks an operation's precondition.
struct ContractViolation : Error
{
    using Error::Error;
};

/// Raised for routes that reference nodes absent from the topology.
struct MalformedRoute : Error
{
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Identity and geometry
// ---------------------------------------------------------------------------

struct UavId
{
    std::uint32_t value = 0;

    constexpr auto operator<=>(const UavId&) const = default;
};

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr bool operator==(const Vec3&) const = default;

    constexpr Vec3 operator+(Vec3 o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(Vec3 o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }

    double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
    constexpr double norm2() const noexcept { return x * x + y * y + z * z; }

    Vec3 normalized() const noexcept
    {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }

    bool finite() const noexcept
    {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

using Position3 = Vec3;

/// Euclidean distance in meters.
inline double distance(Position3 a, Position3 b) noexcept
{
    return (a - b).norm();
}

/// Axis-aligned topology box.
struct Box
{
    Vec3 min;
    Vec3 max;

    Vec3 extent() const noexcept { return max - min; }
    double volume() const noexcept
    {
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }
    bool contains(Vec3 p) const noexcept
    {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
};

// ---------------------------------------------------------------------------
// Roles
// ---------------------------------------------------------------------------

struct Wormhole
{
    UavId peer;
};

struct SelectiveForwarding
{
    double drop_probability = 1.0;
};

struct Sinkhole
{
};

using AttackKind = std::variant<Wormhole, SelectiveForwarding, Sinkhole>;

struct NormalRole
{
};

struct GroundStationRole
{
};

struct AttackerRole
{
    AttackKind kind;
};

using NodeRole = std::variant<NormalRole, GroundStationRole, AttackerRole>;

inline bool is_attacker(const NodeRole& role) noexcept
{
    return std::holds_alternative<AttackerRole>(role);
}

// Received signal strength index: inverse-square of distance, floored at 1 m^2.
inline constexpr double kNormalTxPower = 1.0;
inline constexpr double kAttackerTxPower = 4.0;
inline constexpr double kSsiDistanceFloor = 1.0;

inline double tx_power_for(const NodeRole& role) noexcept
{
    return is_attacker(role) ? kAttackerTxPower : kNormalTxPower;
}

inline double received_ssi(double tx_power, double dist) noexcept
{
    return tx_power / std::max(dist * dist, kSsiDistanceFloor);
}

// ---------------------------------------------------------------------------
// Packets
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kDataPayloadBytes = 512;

struct Rreq
{
    std::uint64_t id = 0;
    UavId src;
    UavId dst;
    std::uint32_t hop_count = 0;
    std::vector<UavId> path_so_far;
    std::uint64_t dst_seq = 0;

    bool operator==(const Rreq&) const = default;
};

struct Rrep
{
    std::vector<UavId> route; // src first, dst last
    std::uint64_t dst_seq = 0;
    std::uint32_t hop_count = 0;
    std::uint64_t rreq_id = 0;

    bool operator==(const Rrep&) const = default;
};

struct Hello
{
    std::uint64_t route_id = 0;
    std::uint32_t probe_round = 0;

    bool operator==(const Hello&) const = default;
};

struct Confirm
{
    std::uint64_t route_id = 0;
    std::uint32_t probe_round = 0;
    double hello_sent = 0.0;

    bool operator==(const Confirm&) const = default;
};

struct Test
{
    std::uint64_t route_id = 0;
    std::uint32_t seq = 0;
    std::uint32_t interval = 0;

    bool operator==(const Test&) const = default;
};

struct Data
{
    std::uint64_t seq = 0;
    std::uint32_t payload_bytes = kDataPayloadBytes;
    std::uint64_t session = 0;

    bool operator==(const Data&) const = default;
};

struct Alert
{
    UavId blacklisted;

    bool operator==(const Alert&) const = default;
};

using Payload = std::variant<Rreq, Rrep, Hello, Confirm, Test, Data, Alert>;

enum class PacketKind : std::uint8_t
{
    Rreq,
    Rrep,
    Hello,
    Confirm,
    Test,
    Data,
    Alert,
};

inline constexpr const char* to_string(PacketKind k) noexcept
{
    switch (k)
    {
    case PacketKind::Rreq: return "RREQ";
    case PacketKind::Rrep: return "RREP";
    case PacketKind::Hello: return "HELLO";
    case PacketKind::Confirm: return "CONFIRM";
    case PacketKind::Test: return "TEST";
    case PacketKind::Data: return "DATA";
    case PacketKind::Alert: return "ALERT";
    }
    return "?";
}

/// A packet in flight. Source-routed kinds (RREP, HELLO, CONFIRM, TEST, DATA)
/// carry their hop list in `path`; `cursor` indexes the current holder.
struct Packet
{
    UavId origin;
    UavId sender;
    double timestamp = 0.0;
    double tx_power = kNormalTxPower;
    std::vector<UavId> path;
    std::uint32_t cursor = 0;
    Payload body;

    bool operator==(const Packet&) const = default;

    PacketKind kind() const noexcept { return static_cast<PacketKind>(body.index()); }

    bool source_routed() const noexcept { return !path.empty(); }

    std::optional<UavId> next_hop() const
    {
        if (cursor + 1 < path.size())
            return path[cursor + 1];
        return std::nullopt;
    }

    bool at_last_hop() const noexcept { return cursor + 1 >= path.size(); }
};

inline bool is_data_plane(PacketKind k) noexcept
{
    return k == PacketKind::Hello || k == PacketKind::Confirm || k == PacketKind::Test ||
           k == PacketKind::Data;
}

inline bool is_control(PacketKind k) noexcept
{
    return k == PacketKind::Rreq || k == PacketKind::Rrep;
}

// ---------------------------------------------------------------------------
// Routes
// ---------------------------------------------------------------------------

struct Route
{
    std::uint64_t id = 0;
    UavId src;
    UavId dst;
    std::vector<UavId> hops; // src first, dst last

    bool operator==(const Route&) const = default;

    std::size_t hop_count() const noexcept { return hops.empty() ? 0 : hops.size() - 1; }

    bool contains(UavId u) const noexcept
    {
        return std::find(hops.begin(), hops.end(), u) != hops.end();
    }

    /// Intermediate UAVs only (endpoints excluded).
    std::vector<UavId> relays() const
    {
        if (hops.size() <= 2)
            return {};
        return {hops.begin() + 1, hops.end() - 1};
    }
};

inline Route make_route(std::uint64_t id, std::vector<UavId> hops)
{
    if (hops.empty())
        throw MalformedRoute("route has no hops");
    Route r;
    r.id = id;
    r.src = hops.front();
    r.dst = hops.back();
    r.hops = std::move(hops);
    return r;
}

inline bool acyclic(const std::vector<UavId>& hops)
{
    std::vector<std::uint32_t> ids;
    ids.reserve(hops.size());
    for (auto h : hops)
        ids.push_back(h.value);
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

/// Measured behavior of a route (the antigen's raw material).
struct RouteStats
{
    double delay = 0.0; // seconds, one-way
    double plr = 0.0;   // fraction
    double pdr = 1.0;   // fraction
    double fsr = 0.0;   // duplicate / retransmitted packets observed
    double rtt = 0.0;   // seconds
    double ssi = 0.0;   // received signal index

    bool operator==(const RouteStats&) const = default;

    bool valid() const noexcept
    {
        auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
        return ok(delay) && ok(plr) && ok(pdr) && ok(fsr) && ok(rtt) && ok(ssi) && plr <= 1.0 &&
               pdr <= 1.0;
    }
};

/// Positions indexed by UavId value.
struct TopologySnapshot
{
    std::vector<Position3> positions;

    bool contains(UavId id) const noexcept { return id.value < positions.size(); }

    Position3 at(UavId id) const
    {
        if (!contains(id))
            throw MalformedRoute("unknown UAV " + std::to_string(id.value));
        return positions[id.value];
    }
};

/// True iff the hops are acyclic and every consecutive pair lies within range.
inline bool validate_route(const Route& route, const TopologySnapshot& topology, double range)
{
    for (auto h : route.hops)
    {
        if (!topology.contains(h))
            throw MalformedRoute("route " + std::to_string(route.id) + " references unknown UAV " +
                                 std::to_string(h.value));
    }
    if (route.hops.empty() || !acyclic(route.hops))
        return false;
    for (std::size_t i = 1; i < route.hops.size(); ++i)
    {
        if (distance(topology.at(route.hops[i - 1]), topology.at(route.hops[i])) > range)
            return false;
    }
    return true;
}

} // namespace aspuavn

template <>
struct std::hash<aspuavn::UavId>
{
    std::size_t operator()(aspuavn::UavId id) const noexcept
    {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
