#pragma once

// Evaluation, decision-making and defensive agents. They observe the network
// only through packets they send and receive (Hello/Confirm probes, Test
// packets, neighbor overhearing) and act on it by flooding Alerts.

#include "analysis.hpp"
#include "domain.hpp"
#include "immunity.hpp"
#include "trace.hpp"
#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace aspuavn
{

/// What the agents need from the packet layer.
template <typename N>
concept AgentTransport = requires(N& n, const N& cn, const Route& r, UavId u, std::uint64_t id,
                                  std::uint32_t k, std::size_t sz, double t) {
    { cn.clock() } -> std::convertible_to<double>;
    { cn.probe_timeout() } -> std::convertible_to<double>;
    { cn.hop_delay() } -> std::convertible_to<double>;
    { n.send_hello(r, k) } -> std::convertible_to<bool>;
    { cn.probe(id, k) } -> std::convertible_to<const ProbeRecord*>;
    n.run_until(t);
    n.begin_watch(id, sz);
    n.send_test(r, k, k);
    { n.end_watch(id) } -> std::convertible_to<std::map<UavId, WatchCounts>>;
    n.flood_alert(u, u);
    { cn.blacklisted(u, u) } -> std::convertible_to<bool>;
    { n.trace() } -> std::same_as<Trace&>;
};

struct AgentParams
{
    double initial_suspicion = 50.0;
    double alpha = 0.5;          // EWMA regulation factor
    std::uint32_t n_test = 10;   // test packets per interval
    std::uint32_t intervals = 4; // consecutive watchdog intervals
    double test_spacing = 0.01;  // s between test packets
    double hello_spacing = 0.01; // s between pipelined probe rounds
    std::uint32_t mal_thr = 0;   // 0 selects ceil(n_test / 2)

    std::uint32_t drop_threshold() const noexcept { return mal_thr ? mal_thr : default_mal_threshold(n_test); }

    void validate() const
    {
        if (!(initial_suspicion >= 0.0 && initial_suspicion <= 100.0))
            throw ConfigError("initial_suspicion", "must lie in [0, 100]");
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw ConfigError("alpha", "must lie in (0, 1]");
        if (n_test == 0)
            throw ConfigError("n_test", "must be at least 1");
        if (intervals == 0)
            throw ConfigError("intervals", "must be at least 1");
        if (!(test_spacing > 0.0))
            throw ConfigError("test_spacing", "must be positive");
        if (!(hello_spacing > 0.0))
            throw ConfigError("hello_spacing", "must be positive");
    }
};

// ---------------------------------------------------------------------------
// Evaluation agent
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kProbeRounds = 4;
inline constexpr double kConfirmCredit = 25.0;
inline constexpr double kMissPenalty = 15.0;
inline constexpr double kRejectAbove = 50.0;

enum class ProbeOutcome : std::uint8_t
{
    Confirmed,
    Unconfirmed,
};

struct RouteSuspicion
{
    std::uint64_t route_id = 0;
    double p_malicious = 50.0;
    std::uint32_t probe_rounds_done = 0;

    bool rejected() const noexcept { return p_malicious > kRejectAbove; }
};

inline RouteSuspicion update_suspicion(RouteSuspicion s, ProbeOutcome outcome)
{
    if (s.probe_rounds_done >= kProbeRounds)
        throw ContractViolation("update_suspicion: all probe rounds already used for route " +
                                std::to_string(s.route_id));
    const double delta = outcome == ProbeOutcome::Confirmed ? -kConfirmCredit : kMissPenalty;
    s.p_malicious = std::clamp(s.p_malicious + delta, 0.0, 100.0);
    ++s.probe_rounds_done;
    return s;
}

/// Sends one Hello and waits for the Confirm or the probe timeout.
template <AgentTransport N>
ProbeOutcome probe_route(N& net, const Route& route, std::uint32_t round)
{
    net.send_hello(route, round);
    const double deadline = net.clock() + net.probe_timeout();
    net.run_until(deadline, [&] {
        const ProbeRecord* rec = net.probe(route.id, round);
        return rec && rec->confirmed;
    });
    const ProbeRecord* rec = net.probe(route.id, round);
    return rec && rec->confirmed ? ProbeOutcome::Confirmed : ProbeOutcome::Unconfirmed;
}

struct EvaluatedRoute
{
    Route route;
    RouteStats stats;
    RouteSuspicion suspicion;
    std::vector<ProbeOutcome> outcomes;
};

struct Evaluation
{
    std::vector<EvaluatedRoute> survivors;
    std::vector<EvaluatedRoute> rejected;
};

/// Probes every candidate for exactly four rounds. Rounds are pipelined:
/// round k's Hellos leave `hello_spacing` seconds after round k-1's, and a
/// round counts as confirmed only if its Confirm returned within the probe
/// timeout of its own Hello.
template <AgentTransport N>
Evaluation evaluate_routes(N& net, const std::vector<DiscoveredRoute>& candidates, const AgentParams& params)
{
    if (candidates.empty())
        throw ContractViolation("evaluate_routes: no candidates");
    std::vector<EvaluatedRoute> ev;
    ev.reserve(candidates.size());
    for (const auto& c : candidates)
        ev.push_back({c.route, c.stats, RouteSuspicion{c.route.id, params.initial_suspicion, 0}, {}});

    auto on_time = [&](const EvaluatedRoute& e, std::uint32_t round) {
        const ProbeRecord* rec = net.probe(e.route.id, round);
        return rec && rec->confirmed && rec->confirmed_at - rec->sent_at <= net.probe_timeout();
    };
    for (std::uint32_t round = 1; round <= kProbeRounds; ++round)
    {
        for (const auto& e : ev)
            net.send_hello(e.route, round);
        if (round < kProbeRounds)
            net.run_until(net.clock() + params.hello_spacing);
    }
    net.run_until(net.clock() + net.probe_timeout(), [&] {
        return std::all_of(ev.begin(), ev.end(), [&](const EvaluatedRoute& e) {
            for (std::uint32_t round = 1; round <= kProbeRounds; ++round)
            {
                if (!on_time(e, round))
                    return false;
            }
            return true;
        });
    });

    std::vector<double> rtt_sum(ev.size(), 0.0);
    std::vector<std::uint32_t> dup(ev.size(), 0);
    for (std::size_t i = 0; i < ev.size(); ++i)
    {
        for (std::uint32_t round = 1; round <= kProbeRounds; ++round)
        {
            const bool ok = on_time(ev[i], round);
            const ProbeOutcome o = ok ? ProbeOutcome::Confirmed : ProbeOutcome::Unconfirmed;
            ev[i].outcomes.push_back(o);
            ev[i].suspicion = update_suspicion(ev[i].suspicion, o);
            const ProbeRecord* rec = net.probe(ev[i].route.id, round);
            if (ok)
                rtt_sum[i] += rec->confirmed_at - rec->sent_at;
            if (rec)
                dup[i] += rec->duplicates;
        }
    }

    Evaluation out;
    for (std::size_t i = 0; i < ev.size(); ++i)
    {
        auto& e = ev[i];
        const auto confirmed = static_cast<std::uint32_t>(
            std::count(e.outcomes.begin(), e.outcomes.end(), ProbeOutcome::Confirmed));
        e.stats.pdr = static_cast<double>(confirmed) / kProbeRounds;
        e.stats.plr = 1.0 - e.stats.pdr;
        e.stats.delay = confirmed ? rtt_sum[i] / (2.0 * confirmed) : net.probe_timeout();
        e.stats.fsr += dup[i];
        if (!(e.stats.rtt > 0.0))
            e.stats.rtt = confirmed ? rtt_sum[i] / confirmed : 2.0 * net.probe_timeout();
        if (e.suspicion.rejected())
        {
            net.trace().note(net.clock(), TraceEvent::RouteRejected, e.route.src.value, e.route.dst.value,
                             static_cast<std::int64_t>(e.route.id), format_hops(e.route.hops));
            out.rejected.push_back(std::move(e));
        }
        else
            out.survivors.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decision-making agent
// ---------------------------------------------------------------------------

struct ThresholdInputs
{
    double max_delay = 0.0;
    double max_plr = 0.0;
    double max_pdr = 0.0;
    double max_fsr = 0.0;

    static ThresholdInputs over(const std::vector<RouteStats>& set)
    {
        ThresholdInputs in;
        for (const auto& s : set)
        {
            in.max_delay = std::max(in.max_delay, s.delay);
            in.max_plr = std::max(in.max_plr, s.plr);
            in.max_pdr = std::max(in.max_pdr, s.pdr);
            in.max_fsr = std::max(in.max_fsr, s.fsr);
        }
        return in;
    }
};

/// Th = Delay/MaxDelay + PLR/MaxPLR + MaxPDR/PDR + FSR/MaxFSR. A route that
/// delivered nothing scores +infinity; an axis whose maximum is zero adds 0.
inline double compute_threshold(const ThresholdInputs& in, const RouteStats& r)
{
    if (!(r.pdr > 0.0))
        return std::numeric_limits<double>::infinity();
    auto term = [](double v, double max) { return max > 0.0 ? v / max : 0.0; };
    return term(r.delay, in.max_delay) + term(r.plr, in.max_plr) +
           (in.max_pdr > 0.0 ? in.max_pdr / r.pdr : 0.0) + term(r.fsr, in.max_fsr);
}

inline std::vector<ScoredRoute> score_routes(const std::vector<EvaluatedRoute>& routes)
{
    std::vector<RouteStats> stats;
    for (const auto& r : routes)
        stats.push_back(r.stats);
    const auto in = ThresholdInputs::over(stats);
    std::vector<ScoredRoute> out;
    for (const auto& r : routes)
        out.push_back({r.route, r.stats, compute_threshold(in, r.stats)});
    return out;
}

struct Decision
{
    std::optional<ScoredRoute> eliminated;
    std::vector<ScoredRoute> remaining;
};

/// Eliminates the highest-Th route (lowest id on ties) unless it is the only one.
inline Decision decide(const std::vector<ScoredRoute>& survivors)
{
    if (survivors.empty())
        throw ContractViolation("decide: no survivors");
    Decision d;
    if (survivors.size() == 1)
    {
        d.remaining = survivors;
        return d;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < survivors.size(); ++i)
    {
        const auto& a = survivors[i];
        const auto& b = survivors[worst];
        if (a.th > b.th || (a.th == b.th && a.route.id < b.route.id))
            worst = i;
    }
    d.eliminated = survivors[worst];
    for (std::size_t i = 0; i < survivors.size(); ++i)
    {
        if (i != worst)
            d.remaining.push_back(survivors[i]);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Defensive agent
// ---------------------------------------------------------------------------

struct EwmaState
{
    double alpha = 0.5;
    double m = 0.0;
    std::uint32_t t = 0; // samples folded in so far
};

/// M_1 = X_1, then M_t = alpha * X_t + (1 - alpha) * M_{t-1}.
inline EwmaState ewma_update(EwmaState s, double x)
{
    s.m = s.t == 0 ? x : s.alpha * x + (1.0 - s.alpha) * s.m;
    ++s.t;
    return s;
}

enum class UavVerdict : std::uint8_t
{
    Normal,
    Malicious,
};

inline UavVerdict classify_uav(double forwarded_total, double m_t) noexcept
{
    return forwarded_total <= m_t ? UavVerdict::Malicious : UavVerdict::Normal;
}

struct WatchdogLog
{
    std::uint64_t route_id = 0;
    std::uint32_t n_test = 0;
    std::uint32_t intervals = 0;
    std::map<UavId, WatchCounts> counts;
    bool truncated = false; // some test packets never reached the destination
};

/// One interval: `n_test` Test packets along the route, then a drain.
template <AgentTransport N>
void watchdog_interval(N& net, const Route& route, std::uint32_t n_test, std::uint32_t interval,
                       double spacing)
{
    const double t0 = net.clock();
    for (std::uint32_t i = 0; i < n_test; ++i)
    {
        const double at = t0 + static_cast<double>(i) * spacing;
        if (at > net.clock())
            net.run_until(at);
        net.send_test(route, interval * n_test + i, interval);
    }
    net.run_until(net.clock() + static_cast<double>(route.hops.size() + 1) * net.hop_delay() + 1e-9);
}

template <AgentTransport N>
WatchdogLog watch_route(N& net, const Route& route, const AgentParams& params)
{
    WatchdogLog log;
    log.route_id = route.id;
    log.n_test = params.n_test;
    log.intervals = params.intervals;
    net.begin_watch(route.id, params.intervals);
    for (std::uint32_t k = 0; k < params.intervals; ++k)
        watchdog_interval(net, route, params.n_test, k, params.test_spacing);
    log.counts = net.end_watch(route.id);
    std::uint64_t at_dst = 0;
    if (auto it = log.counts.find(route.dst); it != log.counts.end())
    {
        for (auto c : it->second.received)
            at_dst += c;
    }
    log.truncated = at_dst < static_cast<std::uint64_t>(params.n_test) * params.intervals;
    return log;
}

struct UavJudgement
{
    UavId uav;
    double m_t = 0.0;
    std::uint64_t forwarded_total = 0;
    std::uint64_t max_interval_drops = 0;
    UavVerdict verdict = UavVerdict::Normal;
    bool drop_trigger = false;

    bool isolate() const noexcept { return verdict == UavVerdict::Malicious || drop_trigger; }
};

/// Judges every relay that received at least one test packet. The EWMA runs
/// over that relay's own per-interval receipts, so a UAV starved by upstream
/// loss is never blamed for it.
inline std::vector<UavJudgement> judge_route(const WatchdogLog& log, const Route& route, const AgentParams& params)
{
    std::vector<UavJudgement> out;
    for (const UavId uav : route.relays())
    {
        auto it = log.counts.find(uav);
        if (it == log.counts.end())
            continue;
        const WatchCounts& c = it->second;
        std::uint64_t received = 0;
        for (auto x : c.received)
            received += x;
        if (received == 0)
            continue;
        UavJudgement j;
        j.uav = uav;
        EwmaState s{params.alpha, 0.0, 0};
        for (auto x : c.received)
            s = ewma_update(s, static_cast<double>(x));
        j.m_t = s.m;
        for (auto f : c.forwarded)
            j.forwarded_total += f;
        for (auto d : c.dropped)
            j.max_interval_drops = std::max<std::uint64_t>(j.max_interval_drops, d);
        j.verdict = classify_uav(static_cast<double>(j.forwarded_total), j.m_t);
        j.drop_trigger = mal_threshold_trigger(j.max_interval_drops, params.drop_threshold());
        out.push_back(j);
    }
    return out;
}

/// Floods an Alert from `judge` naming `uav`. Repeat calls are no-ops.
template <AgentTransport N>
bool isolate(N& net, UavId judge, UavId uav)
{
    if (judge == uav || net.blacklisted(judge, uav))
        return false;
    net.trace().note(net.clock(), TraceEvent::Isolated, judge.value, uav.value);
    net.flood_alert(judge, uav);
    return true;
}

struct DefenseOutcome
{
    WatchdogLog log;
    std::vector<UavJudgement> judgements;
    std::vector<UavId> isolated;
};

/// Watches a suspect route, classifies its relays and isolates the culprits.
template <AgentTransport N>
DefenseOutcome defend(N& net, UavId judge, const Route& suspect, const AgentParams& params)
{
    DefenseOutcome out;
    out.log = watch_route(net, suspect, params);
    out.judgements = judge_route(out.log, suspect, params);
    for (const auto& j : out.judgements)
    {
        net.trace().note(net.clock(), TraceEvent::Classified, judge.value, j.uav.value,
                         j.isolate() ? 1 : 0);
        if (j.isolate() && isolate(net, judge, j.uav))
            out.isolated.push_back(j.uav);
    }
    return out;
}

} // namespace aspuavn
