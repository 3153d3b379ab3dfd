#pragma once

// Append-only run trace. One record per packet disposition or agent
// decision; rendered as one text line per record.

#include "domain.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace aspuavn
{

enum class TraceEvent : std::uint8_t
{
    RunHeader,
    Tx,             // node transmitted (peer = intended receiver or broadcast marker)
    Delivered,      // node received packet from peer
    OutOfRange,     // unicast from node to peer failed: peer out of range
    BlacklistDrop,  // node discarded packet from blacklisted peer
    AttackDrop,     // attacker node dropped a packet (ground-truth record)
    Forged,         // attacker node emitted a forged RREP
    Tunneled,       // wormhole node tunneled a packet to its peer
    Advertised,     // sinkhole broadcast an unsolicited RREP
    SessionStart,   // node = src, peer = dst, value = session id
    RouteDiscovered,// node = src, value = route id, detail = hops
    RouteRejected,  // evaluation agent rejected route (value = route id)
    RouteEliminated,// decision agent eliminated route
    DetectorFlag,   // negative-selection classifier flagged route
    ProbeTimeout,   // value = route id
    Classified,     // node = judging source, peer = uav, value = 1 malicious / 0 normal
    Isolated,       // node = source issuing alert, peer = isolated uav
    Blacklisted,    // node added peer to its blacklist
    RouteSelected,  // node = src, value = route id, detail = hops
    DataSent,       // node = src, peer = dst, value = session id
    DataReceived,   // node = dst, peer = src, value = session id
    SessionEnd,     // node = src, peer = dst, value = session id
    MalformedEvent, // event skipped by the engine
    RunEnd,
};

inline constexpr const char* to_string(TraceEvent e) noexcept
{
    switch (e)
    {
    case TraceEvent::RunHeader: return "RUN";
    case TraceEvent::Tx: return "TX";
    case TraceEvent::Delivered: return "RX";
    case TraceEvent::OutOfRange: return "DROP";
    case TraceEvent::BlacklistDrop: return "BLDROP";
    case TraceEvent::AttackDrop: return "ATKDROP";
    case TraceEvent::Forged: return "FORGE";
    case TraceEvent::Tunneled: return "TUNNEL";
    case TraceEvent::Advertised: return "ADVERT";
    case TraceEvent::SessionStart: return "SESSION";
    case TraceEvent::RouteDiscovered: return "DISCOVERED";
    case TraceEvent::RouteRejected: return "REJECTED";
    case TraceEvent::RouteEliminated: return "ELIMINATED";
    case TraceEvent::DetectorFlag: return "NONSELF";
    case TraceEvent::ProbeTimeout: return "PROBE_TIMEOUT";
    case TraceEvent::Classified: return "CLASSIFIED";
    case TraceEvent::Isolated: return "ISOLATED";
    case TraceEvent::Blacklisted: return "BLACKLISTED";
    case TraceEvent::RouteSelected: return "SELECTED";
    case TraceEvent::DataSent: return "DATA_SENT";
    case TraceEvent::DataReceived: return "DATA_RECV";
    case TraceEvent::SessionEnd: return "SESSION_END";
    case TraceEvent::MalformedEvent: return "MALFORMED";
    case TraceEvent::RunEnd: return "END";
    }
    return "?";
}

inline constexpr std::uint32_t kBroadcast = 0xffffffffu;
inline constexpr std::uint32_t kNoNode = 0xfffffffeu;

struct TraceRecord
{
    double time = 0.0;
    TraceEvent event = TraceEvent::Tx;
    std::uint32_t node = kNoNode;
    std::uint32_t peer = kNoNode;
    PacketKind packet = PacketKind::Data;
    bool has_packet = false;
    std::int64_t value = 0;
    std::string detail;

    const char* disposition() const noexcept
    {
        switch (event)
        {
        case TraceEvent::Delivered: return "delivered";
        case TraceEvent::OutOfRange: return "dropped";
        case TraceEvent::BlacklistDrop: return "blacklist-dropped";
        case TraceEvent::AttackDrop: return "attack-dropped";
        case TraceEvent::Tx: return "sent";
        default: return "-";
        }
    }

    std::string to_line() const
    {
        auto id = [](std::uint32_t v) -> std::string {
            if (v == kBroadcast)
                return "*";
            if (v == kNoNode)
                return "-";
            return std::to_string(v);
        };
        char head[64];
        std::snprintf(head, sizeof head, "%.9f", time);
        std::string line = head;
        line += ' ';
        line += to_string(event);
        line += ' ';
        line += id(node);
        line += ' ';
        line += id(peer);
        line += ' ';
        line += has_packet ? to_string(packet) : "-";
        line += ' ';
        line += disposition();
        line += ' ';
        line += std::to_string(value);
        if (!detail.empty())
        {
            line += ' ';
            line += detail;
        }
        return line;
    }
};

inline std::string format_hops(const std::vector<UavId>& hops)
{
    std::string s;
    for (std::size_t i = 0; i < hops.size(); ++i)
    {
        if (i)
            s += '-';
        s += std::to_string(hops[i].value);
    }
    return s;
}

inline std::vector<UavId> parse_hops(const std::string& s)
{
    std::vector<UavId> out;
    std::size_t pos = 0;
    while (pos < s.size())
    {
        auto next = s.find('-', pos);
        if (next == std::string::npos)
            next = s.size();
        out.push_back(UavId{static_cast<std::uint32_t>(std::stoul(s.substr(pos, next - pos)))});
        pos = next + 1;
    }
    return out;
}

class Trace
{
public:
    explicit Trace(bool packet_level = true) : packet_level_(packet_level) {}

    bool packet_level() const noexcept { return packet_level_; }
    void set_packet_level(bool on) noexcept { packet_level_ = on; }

    void append(TraceRecord r) { records_.push_back(std::move(r)); }

    void packet(double t, TraceEvent e, UavId node, std::uint32_t peer, PacketKind k)
    {
        if (!packet_level_)
            return;
        TraceRecord r;
        r.time = t;
        r.event = e;
        r.node = node.value;
        r.peer = peer;
        r.packet = k;
        r.has_packet = true;
        records_.push_back(std::move(r));
    }

    void note(double t, TraceEvent e, std::uint32_t node, std::uint32_t peer, std::int64_t value = 0,
              std::string detail = {})
    {
        TraceRecord r;
        r.time = t;
        r.event = e;
        r.node = node;
        r.peer = peer;
        r.value = value;
        r.detail = std::move(detail);
        records_.push_back(std::move(r));
    }

    const std::vector<TraceRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

    void write(std::ostream& os) const
    {
        for (const auto& r : records_)
            os << r.to_line() << '\n';
    }

    std::string str() const
    {
        std::string s;
        for (const auto& r : records_)
        {
            s += r.to_line();
            s += '\n';
        }
        return s;
    }

private:
    bool packet_level_;
    std::vector<TraceRecord> records_;
};

} // namespace aspuavn
