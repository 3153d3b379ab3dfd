#pragma once

// Plain records exchanged between the packet layer and the protocol agents.

#include "domain.hpp"

#include <cstdint>
#include <vector>

namespace aspuavn
{

/// A route reply that made it back to the requesting source.
struct DiscoveryCandidate
{
    Route route;
    std::uint64_t dst_seq = 0;
    std::uint32_t claimed_hops = 0;
    double rtt = 0.0;
    double ssi = 0.0;
    std::uint32_t duplicates = 0;
    double received_at = 0.0;
};

struct ProbeRecord
{
    double sent_at = 0.0;
    bool confirmed = false;
    double confirmed_at = 0.0;
    double hello_delivered_at = -1.0;
    std::uint32_t duplicates = 0;
};

/// Per-UAV test-packet counts for one watchdog campaign.
struct WatchCounts
{
    std::vector<std::uint32_t> received;  // per interval
    std::vector<std::uint32_t> forwarded; // per interval, observed re-emissions
    std::vector<std::uint32_t> dropped;   // per interval, received but not re-emitted
};

struct DeliveryReport
{
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
};

struct DiscoveredRoute
{
    Route route;
    RouteStats stats;
    std::uint64_t dst_seq = 0;
    std::uint32_t claimed_hops = 0;
    bool advertised = false;
};

} // namespace aspuavn
