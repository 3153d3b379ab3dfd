#pragma once

// On-demand multipath discovery and hop-by-hop data delivery.

#include "network.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace aspuavn
{

/// Floods an RREQ from `src`, waits for the discovery timeout, and returns
/// up to K candidate routes ranked by freshness. Routes previously learned
/// from unsolicited advertisements for the same pair compete for the K slots.
/// An empty result means `dst` was unreachable.
inline std::vector<DiscoveredRoute> discover_routes(Network& net, UavId src, UavId dst)
{
    World& w = net.world();
    if (src == dst)
        throw ContractViolation("discover_routes: src equals dst");
    if (!w.exists(src) || !w.exists(dst))
        throw ContractViolation("discover_routes: unknown endpoint");

    UavNode& s = w.node(src);
    std::uint64_t known_seq = 0;
    for (const auto& e : s.table.entries(src, dst))
    {
        if (!e.advertised)
            known_seq = std::max(known_seq, e.dst_seq);
    }
    const std::uint64_t id = net.next_rreq_id(src);
    s.rreq_cache.insert(id, src);
    net.open_discovery(src, dst, id);

    Packet p;
    p.origin = src;
    p.timestamp = w.clock();
    p.body = Rreq{id, src, dst, 0, {src}, known_seq};
    w.transmit(std::move(p), src, std::nullopt);
    net.run_until(w.clock() + net.params().discovery_timeout);

    DiscoveryState st = net.close_discovery(src, id);

    std::vector<RouteEntry> entries;
    for (auto& c : st.candidates)
    {
        RouteEntry e;
        e.route = c.route;
        e.discovered_at = c.received_at;
        e.dst_seq = c.dst_seq;
        e.claimed_hops = c.claimed_hops;
        e.stats.rtt = c.rtt;
        e.stats.delay = c.rtt / 2.0;
        e.stats.ssi = c.ssi;
        e.stats.fsr = c.duplicates;
        entries.push_back(std::move(e));
    }
    const UavNode& sref = w.node(src);
    for (const auto& e : sref.table.entries(src, dst))
    {
        if (!e.advertised)
            continue;
        const bool clean = std::none_of(e.route.hops.begin(), e.route.hops.end(),
                                        [&](UavId h) { return sref.blacklisted(h); });
        const bool dup = std::any_of(entries.begin(), entries.end(),
                                     [&](const RouteEntry& x) { return x.route.hops == e.route.hops; });
        if (clean && !dup)
            entries.push_back(e);
    }
    std::stable_sort(entries.begin(), entries.end(), RoutingTable::more_attractive);
    if (entries.size() > w.config().k_routes)
        entries.resize(w.config().k_routes);
    w.node(src).table.replace(src, dst, entries);

    std::vector<DiscoveredRoute> out;
    for (const auto& e : entries)
    {
        w.trace().note(w.clock(), TraceEvent::RouteDiscovered, src.value, dst.value,
                       static_cast<std::int64_t>(e.route.id), format_hops(e.route.hops));
        out.push_back({e.route, e.stats, e.dst_seq, e.claimed_hops, e.advertised});
    }
    return out;
}

/// Sends `n_packets` DATA packets along `route`, spaced `interval` seconds,
/// then drains in-flight packets. Packets lost at broken links or attackers
/// simply never arrive.
inline DeliveryReport send_data(Network& net, const Route& route, std::size_t n_packets,
                                double interval, std::uint64_t session)
{
    if (route.hops.size() < 2)
        throw ContractViolation("send_data: route needs at least two hops");
    World& w = net.world();
    DeliveryReport rep;
    const double t0 = w.clock();
    for (std::size_t i = 0; i < n_packets; ++i)
    {
        const double at = t0 + static_cast<double>(i) * interval;
        if (at > w.clock())
            net.run_until(at);
        net.send_data_packet(route, i, session);
        ++rep.sent;
    }
    const double drain = static_cast<double>(route.hops.size() + 1) * w.hop_delay() + 1e-9;
    net.run_until(w.clock() + drain);
    rep.received = net.data_received(session);
    return rep;
}

} // namespace aspuavn
