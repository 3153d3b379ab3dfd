#pragma once

// One simulation run: build the swarm, run sessions until the horizon, score
// the trace and evaluate the theory checks. Produces one CSV row.

#include "analysis.hpp"
#include "metrics.hpp"
#include "protocol.hpp"
#include "scenario.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <string>
#include <vector>

namespace aspuavn
{

struct RunSpec
{
    std::uint64_t seed = 1;
    std::size_t antibodies = 200;
    bool defense = true;
};

struct RunResult
{
    std::string scenario;
    RunSpec spec;
    double malicious = 0.0;
    std::string kinds;
    double pdr = 0.0;
    double plr = 0.0;
    double pooled_pdr = 0.0;
    Rates rates;
    ConfusionMatrix cm;
    std::uint64_t control_msg_count = 0;
    double runtime = 0.0; // simulated seconds covered by the run
    std::size_t sessions = 0;
    std::uint64_t attackers = 0;
    std::uint64_t isolated = 0;

    TheoremReport theorem;
    std::uint64_t msg_expected = 0;
    std::uint64_t msg_measured = 0;
    bool msg_comparable = false;

    std::string trace; // full text trace when requested
};

inline const char* csv_header()
{
    return "seed,scenario,antibodies,malicious,attack_kinds,defense,pdr,plr,pooled_pdr,fpr,fnr,dr,"
           "control_msg_count,runtime,theorem_lhs,theorem_bound,theorem_holds,min_beta,"
           "msg_expected,msg_measured,msg_comparable";
}

namespace detail
{
inline std::string fmt(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string fmt_rate(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }
} // namespace detail

inline std::string csv_row(const RunResult& r)
{
    using detail::fmt;
    std::string s;
    s += std::to_string(r.spec.seed) + ',' + r.scenario + ',' + std::to_string(r.spec.antibodies) + ',' +
         fmt(r.malicious) + ',' + r.kinds + ',' + (r.spec.defense ? "on" : "off") + ',';
    s += fmt(r.pdr) + ',' + fmt(r.plr) + ',' + fmt(r.pooled_pdr) + ',';
    s += detail::fmt_rate(r.rates.fpr) + ',' + detail::fmt_rate(r.rates.fnr) + ',' + detail::fmt_rate(r.rates.dr) + ',';
    s += std::to_string(r.control_msg_count) + ',' + fmt(r.runtime) + ',';
    s += fmt(r.theorem.lhs) + ',' + fmt(r.theorem.bound) + ',' + (r.theorem.holds ? "1" : "0") + ',' +
         fmt(r.theorem.min_beta) + ',';
    s += std::to_string(r.msg_expected) + ',' + std::to_string(r.msg_measured) + ',' + (r.msg_comparable ? "1" : "0");
    return s;
}

/// Nodes reachable from `src` over the current unit-disk graph.
inline std::vector<bool> reachable_from(const World& w, UavId src)
{
    std::vector<bool> seen(w.size(), false);
    std::deque<UavId> q{src};
    seen[src.value] = true;
    while (!q.empty())
    {
        const UavId u = q.front();
        q.pop_front();
        for (auto v : w.neighbors(u))
        {
            if (!seen[v.value])
            {
                seen[v.value] = true;
                q.push_back(v);
            }
        }
    }
    return seen;
}

/// Draws a source-destination pair among `endpoints`, preferring pairs that
/// are connected right now.
inline std::pair<UavId, UavId> pick_pair(const World& w, const std::vector<UavId>& endpoints, Rng& rng)
{
    constexpr int kTries = 8;
    for (int t = 0; t < kTries; ++t)
    {
        const UavId src = endpoints[rng.below(endpoints.size())];
        const auto reach = reachable_from(w, src);
        std::vector<UavId> options;
        for (auto e : endpoints)
        {
            if (e != src && reach[e.value])
                options.push_back(e);
        }
        if (!options.empty())
            return {src, options[rng.below(options.size())]};
    }
    const UavId src = endpoints[rng.below(endpoints.size())];
    UavId dst = src;
    while (dst == src)
        dst = endpoints[rng.below(endpoints.size())];
    return {src, dst};
}

struct RunOptions
{
    bool keep_trace = false;
};

/// Records the run's ground truth and everything needed for audits.
struct RunArtifacts
{
    std::set<UavId> attackers;
    std::vector<SessionResult> sessions;
    std::vector<TraceRecord> records;
};

inline RunResult run_scenario(const ScenarioConfig& cfg, const RunSpec& spec, const RunOptions& opt = {},
                              RunArtifacts* artifacts = nullptr)
{
    cfg.validate();
    RunResult res;
    res.scenario = cfg.id;
    res.spec = spec;
    res.malicious = cfg.malicious;
    res.kinds = cfg.malicious > 0.0 ? kinds_to_string(cfg.kinds) : "none";

    Network net(cfg.world(), spec.seed, cfg.network());
    World& w = net.world();
    w.trace().note(0.0, TraceEvent::RunHeader, kNoNode, kNoNode, static_cast<std::int64_t>(spec.seed),
                   cfg.id + " antibodies=" + std::to_string(spec.antibodies) +
                       " defense=" + (spec.defense ? "on" : "off"));

    Rng placement(spec.seed, Stream::Placement);
    const auto positions = place_nodes_ppp(cfg.node_count, w.config().bounds, placement);
    std::vector<UavId> ids;
    for (std::size_t i = 0; i < positions.size(); ++i)
        ids.push_back(UavId{static_cast<std::uint32_t>(i)});
    Rng roles(spec.seed, Stream::Roles);
    const auto attackers = assign_attackers(ids, net.params().attack, roles);
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        auto it = attackers.find(ids[i]);
        if (it != attackers.end())
            w.add_node(positions[i], it->second);
        else
            w.add_node(positions[i]);
    }
    std::set<UavId> truth;
    std::vector<UavId> endpoints;
    for (auto id : ids)
    {
        if (attackers.contains(id))
            truth.insert(id);
        else
            endpoints.push_back(id);
    }
    res.attackers = truth.size();
    if (endpoints.size() < 2)
        throw ConfigError("attack.malicious", "fewer than two normal UAVs remain as traffic endpoints");

    if (cfg.mobile)
        w.start_mobility();
    net.activate_attacks(cfg.warmup);

    Protocol proto(net, cfg.protocol(spec.antibodies, spec.defense), spec.seed);
    proto.set_collecting(spec.defense && cfg.warmup > 0.0);
    Rng traffic(spec.seed, Stream::Traffic);

    std::vector<SessionResult> sessions;
    std::uint64_t session_id = 0;
    bool training_pending = spec.defense;
    while (w.clock() < cfg.sim_time)
    {
        if (training_pending && w.clock() >= cfg.warmup)
        {
            proto.set_collecting(false);
            proto.train(w.clock());
            training_pending = false;
        }
        const auto [src, dst] = pick_pair(w, endpoints, traffic);
        sessions.push_back(proto.run_session(src, dst, ++session_id));
        const double resume = w.clock() + cfg.session_gap;
        if (resume >= cfg.sim_time)
            break;
        net.run_until(resume);
    }
    if (w.clock() < cfg.sim_time)
        net.run_until(cfg.sim_time);
    res.runtime = w.clock();
    w.trace().note(w.clock(), TraceEvent::RunEnd, kNoNode, kNoNode);

    const RunScore score = score_run(w.trace().records(), ids, truth);
    res.sessions = sessions.size();
    res.pdr = pdr(score.stats);
    res.plr = plr(score.stats);
    res.pooled_pdr = pooled_pdr(score.stats);
    res.cm = score.cm;
    res.rates = rates(score.cm);
    res.isolated = score.predicted_malicious.size();
    res.control_msg_count = w.control_transmissions();

    // Theorem check with the attack-free longest clean route as `len`.
    std::uint64_t len = 0;
    for (const auto& s : sessions)
    {
        if (!s.route)
            continue;
        const bool clean = std::none_of(s.route->hops.begin(), s.route->hops.end(),
                                        [&](UavId h) { return truth.contains(h); });
        if (clean)
            len = std::max<std::uint64_t>(len, s.route->hop_count());
    }
    TheoremInputs ti;
    ti.total_n = cfg.node_count;
    ti.total_m = truth.size();
    ti.len = std::max<std::uint64_t>(len, 1);
    RunMeasurements rm;
    rm.dropped = net.malicious_data_drops();
    rm.received = score.stats.total_received();
    rm.pdr = res.pooled_pdr / 100.0;
    res.theorem = check_theorem1(rm, ti);

    if (!sessions.empty())
    {
        const auto& first = sessions.front();
        ComplexityInputs ci;
        ci.range = cfg.range;
        ci.n = cfg.node_count;
        ci.hop_delay = cfg.hop_delay;
        ci.x = distance(positions[first.src.value], positions[first.dst.value]);
        res.msg_expected = expected_message_complexity(ci);
        res.msg_measured = first.first_discovery_messages + (first.route ? first.route->hop_count() : 0);
        res.msg_comparable = !cfg.mobile;
    }

    if (opt.keep_trace)
        res.trace = w.trace().str();
    if (artifacts)
    {
        artifacts->attackers = truth;
        artifacts->sessions = std::move(sessions);
        artifacts->records = w.trace().records();
    }
    return res;
}

} // namespace aspuavn
