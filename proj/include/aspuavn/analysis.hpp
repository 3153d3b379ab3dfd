#pragma once

// Theory harness: the drop bound and its per-run check, the drop-threshold
// isolation trigger, and discovery message/time complexity accounting.

#include "domain.hpp"
#include "trace.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace aspuavn
{

/// w = 2^(c - r) for a fault link reported malicious c times and reverted r times.
inline double link_weight(std::int64_t c, std::int64_t r) noexcept
{
    return std::exp2(static_cast<double>(c - r));
}

struct TheoremInputs
{
    std::uint64_t total_n = 0;
    std::uint64_t total_m = 0;
    std::uint64_t len = 0;  // hops of the longest error-free route
    double beta = 1.0;

    void validate() const
    {
        if (total_m >= total_n && total_n > 0)
            throw ContractViolation("theorem inputs: malicious count must stay below the node count");
    }
};

/// beta * M * N * ln^2(M * len); zero when there are no malicious UAVs.
inline double drop_bound(const TheoremInputs& in)
{
    if (in.total_m == 0)
        return 0.0;
    const double ml = static_cast<double>(in.total_m) * static_cast<double>(in.len);
    if (!(ml >= 1.0))
        throw ContractViolation("drop_bound: total_m * len must be at least 1");
    const double lg = std::log(ml);
    return in.beta * static_cast<double>(in.total_m) * static_cast<double>(in.total_n) * lg * lg;
}

struct RunMeasurements
{
    std::uint64_t dropped = 0;   // data packets dropped by malicious UAVs
    std::uint64_t received = 0;  // data packets received at destinations
    double pdr = 0.0;            // fraction in [0, 1]
};

struct TheoremReport
{
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = true;
    double min_beta = 0.0; // smallest beta making the inequality hold
};

/// (dropped - PDR) * received against the bound; with no malicious UAVs the
/// bound is the ideal case LHS <= 0.
inline TheoremReport check_theorem1(const RunMeasurements& m, const TheoremInputs& in)
{
    TheoremReport r;
    r.lhs = (static_cast<double>(m.dropped) - m.pdr) * static_cast<double>(m.received);
    r.bound = drop_bound(in);
    r.holds = r.lhs <= r.bound;
    TheoremInputs unit = in;
    unit.beta = 1.0;
    const double scale = in.total_m == 0 ? 0.0 : drop_bound(unit);
    if (r.lhs <= 0.0)
        r.min_beta = 0.0;
    else if (scale > 0.0)
        r.min_beta = r.lhs / scale;
    else
        r.min_beta = std::numeric_limits<double>::infinity();
    return r;
}

inline bool mal_threshold_trigger(std::uint64_t dropped, std::uint64_t mal_thr) noexcept
{
    return dropped >= mal_thr;
}

inline std::uint32_t default_mal_threshold(std::uint32_t n_test) noexcept { return (n_test + 1) / 2; }

/// Live malicious population, decremented once per drop-threshold trigger.
struct MaliciousLedger
{
    std::uint64_t live = 0;

    void on_trigger() noexcept
    {
        if (live > 0)
            --live;
    }
};

struct ComplexityInputs
{
    double x = 0.0;       // m, source-destination distance
    double range = 30.0;  // m
    std::uint64_t n = 0;  // node count
    double hop_delay = 0.005;

    std::uint64_t n_hops() const
    {
        if (!(range > 0.0) || !(x >= 0.0))
            throw ContractViolation("complexity inputs: range must be positive and x non-negative");
        // Nudge by a relative epsilon so x = k * range lands on k.
        return static_cast<std::uint64_t>(std::floor(x / range * (1.0 + 1e-12)));
    }
    std::uint64_t b() const { return n_hops() + 1; }
};

/// 2b + (n - 1).
inline std::uint64_t expected_message_complexity(const ComplexityInputs& in)
{
    if (in.n == 0)
        throw ContractViolation("expected_message_complexity: no nodes");
    return 2 * in.b() + (in.n - 1);
}

/// 3 * n_hops * per-hop delay.
inline double expected_time_complexity(const ComplexityInputs& in)
{
    return 3.0 * static_cast<double>(in.n_hops()) * in.hop_delay;
}

struct ControlCounts
{
    std::uint64_t rreq = 0;
    std::uint64_t rrep = 0;
    std::uint64_t hello = 0;
    std::uint64_t confirm = 0;
    std::uint64_t test = 0;
    std::uint64_t alert = 0;
    bool comparable = true; // false when the topology was mobile

    /// RREQ broadcasts, RREP forwards and one Hello leg per relay.
    std::uint64_t discovery_total() const noexcept { return rreq + rrep + hello; }
    std::uint64_t total() const noexcept { return rreq + rrep + hello + confirm + test + alert; }
};

/// Counts transmissions of each control kind within [from, to].
inline ControlCounts measured_control_messages(const std::vector<TraceRecord>& trace, double from, double to,
                                               bool static_topology)
{
    ControlCounts c;
    c.comparable = static_topology;
    for (const auto& r : trace)
    {
        if (r.event != TraceEvent::Tx || !r.has_packet || r.time < from || r.time > to)
            continue;
        switch (r.packet)
        {
        case PacketKind::Rreq: ++c.rreq; break;
        case PacketKind::Rrep: ++c.rrep; break;
        case PacketKind::Hello: ++c.hello; break;
        case PacketKind::Confirm: ++c.confirm; break;
        case PacketKind::Test: ++c.test; break;
        case PacketKind::Alert: ++c.alert; break;
        default: break;
        }
    }
    return c;
}

} // namespace aspuavn
