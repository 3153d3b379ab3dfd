#pragma once

// Per-session route selection pipeline. With the defense enabled a session
// goes: security memory -> discovery -> evaluation -> decision -> immune
// classification -> affinity / matching -> data. Suspect routes are handed
// to the defensive agent as they surface.

#include "agents.hpp"
#include "immunity.hpp"
#include "network.hpp"
#include "routing.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace aspuavn
{

struct ProtocolParams
{
    bool defense = true;
    AgentParams agents{};
    KbConfig kb{};
    std::size_t antibodies = 200;
    double detector_radius = 0.15;
    std::uint32_t max_rediscoveries = 3;
    std::size_t packets_per_session = 50;
    double packet_interval = 0.02; // s

    void validate() const
    {
        agents.validate();
        kb.validate();
        if (defense && antibodies == 0)
            throw ConfigError("antibodies", "must be at least 1 when the defense is enabled");
        if (!(detector_radius > 0.0))
            throw ConfigError("detector_radius", "must be positive");
        if (packets_per_session == 0)
            throw ConfigError("packets_per_session", "must be at least 1");
        if (!(packet_interval > 0.0))
            throw ConfigError("packet_interval", "must be positive");
    }
};

struct SessionResult
{
    std::uint64_t session = 0;
    UavId src;
    UavId dst;
    std::optional<Route> route;
    bool from_memory = false;
    std::uint32_t discoveries = 0;
    std::uint64_t first_discovery_messages = 0; // RREQ + RREP transmissions
    DeliveryReport delivery;
    std::vector<UavId> isolated;
};

class Protocol
{
public:
    Protocol(Network& net, ProtocolParams params, std::uint64_t seed)
        : net_(net), params_(std::move(params)), detector_rng_(seed, Stream::Detectors),
          self_(params_.kb.max_antigens)
    {
        params_.validate();
    }

    const ProtocolParams& params() const noexcept { return params_; }
    const SelfSet& self_set() const noexcept { return self_; }
    const DetectorSet& detectors() const noexcept { return detectors_; }
    bool trained() const noexcept { return !detectors_.empty(); }

    /// Collects self antigens from evaluated survivors while `collecting` is on.
    void set_collecting(bool on) noexcept { collecting_ = on; }

    /// Trains the shared detector set from the self antigens gathered so far.
    /// Returns false when there is nothing to train on.
    bool train(double now)
    {
        if (self_.size() == 0)
            return false;
        detectors_ = train_detectors(self_.antigens(), params_.antibodies, params_.detector_radius, detector_rng_);
        last_training_ = now;
        return true;
    }

    SessionResult run_session(UavId src, UavId dst, std::uint64_t session)
    {
        SessionResult res;
        pending_self_.reset();
        res.session = session;
        res.src = src;
        res.dst = dst;
        World& w = net_.world();
        w.trace().note(w.clock(), TraceEvent::SessionStart, src.value, dst.value,
                       static_cast<std::int64_t>(session));

        if (params_.defense)
            res.route = select_defended(src, dst, res);
        else
            res.route = select_plain(src, dst, res);

        if (res.route)
        {
            w.trace().note(w.clock(), TraceEvent::RouteSelected, src.value, dst.value,
                           static_cast<std::int64_t>(res.route->id), format_hops(res.route->hops));
            res.delivery = send_data(net_, *res.route, params_.packets_per_session, params_.packet_interval, session);
            if (params_.defense && !collecting_ && pending_self_ && res.delivery.received == res.delivery.sent)
            {
                self_.add(*pending_self_);
                maybe_retrain(w.clock());
            }
        }
        else
        {
            // Unreachable destination: the packets count as sent and lost.
            for (std::size_t i = 0; i < params_.packets_per_session; ++i)
                w.trace().note(w.clock(), TraceEvent::DataSent, src.value, dst.value,
                               static_cast<std::int64_t>(session));
            res.delivery.sent = params_.packets_per_session;
        }
        investigate(res);
        w.trace().note(w.clock(), TraceEvent::SessionEnd, src.value, dst.value, static_cast<std::int64_t>(session));
        return res;
    }

private:
    std::optional<Route> select_plain(UavId src, UavId dst, SessionResult& res)
    {
        auto found = discover(src, dst, res);
        if (found.empty())
            return std::nullopt;
        return found.front().route;
    }

    std::vector<DiscoveredRoute> discover(UavId src, UavId dst, SessionResult& res)
    {
        World& w = net_.world();
        const auto before = w.transmissions(PacketKind::Rreq) + w.transmissions(PacketKind::Rrep);
        auto found = discover_routes(net_, src, dst);
        if (res.discoveries++ == 0)
            res.first_discovery_messages = w.transmissions(PacketKind::Rreq) + w.transmissions(PacketKind::Rrep) - before;
        return found;
    }

    bool clean_at(UavId at, const Route& r) const
    {
        for (auto h : r.hops)
        {
            if (net_.blacklisted(at, h))
                return false;
        }
        return true;
    }

    /// Queues a suspect route for the defensive agent. Investigations run
    /// once the session has a route and its data is on the way, or before a
    /// re-discovery.
    void escalate(UavId judge, const Route& suspect)
    {
        suspects_.emplace_back(judge, suspect);
    }

    void investigate(SessionResult& res)
    {
        auto pending = std::move(suspects_);
        suspects_.clear();
        for (const auto& [judge, suspect] : pending)
        {
            if (!clean_at(judge, suspect))
                continue;
            const DefenseOutcome d = defend(net_, judge, suspect, params_.agents);
            for (auto u : d.isolated)
            {
                memory(judge).blacklist(u);
                res.isolated.push_back(u);
            }
        }
    }

    SecurityMemory& memory(UavId src)
    {
        auto it = memories_.find(src);
        if (it == memories_.end())
            it = memories_.emplace(src, SecurityMemory(params_.kb.storing_time)).first;
        return it->second;
    }

    std::optional<Route> select_defended(UavId src, UavId dst, SessionResult& res)
    {
        World& w = net_.world();
        if (auto stored = memory(src).lookup(src, dst, w.clock()); stored && clean_at(src, *stored))
        {
            res.from_memory = true;
            return stored;
        }

        for (std::uint32_t attempt = 0; attempt <= params_.max_rediscoveries; ++attempt)
        {
            auto found = discover(src, dst, res);
            if (found.empty())
                return std::nullopt;

            Evaluation ev = evaluate_routes(net_, found, params_.agents);
            if (collecting_)
            {
                std::vector<std::pair<std::uint64_t, RouteStats>> raw;
                for (const auto& s : ev.survivors)
                    raw.emplace_back(s.route.id, s.stats);
                for (const auto& a : make_antigens(raw))
                    self_.add(a);
            }
            for (const auto& r : ev.rejected)
                escalate(src, r.route);
            if (ev.survivors.empty())
            {
                investigate(res);
                continue;
            }

            std::vector<ScoredRoute> scored = score_routes(ev.survivors);
            Decision d = decide(scored);
            if (d.eliminated)
            {
                w.trace().note(w.clock(), TraceEvent::RouteEliminated, src.value, dst.value,
                               static_cast<std::int64_t>(d.eliminated->route.id),
                               format_hops(d.eliminated->route.hops));
                escalate(src, d.eliminated->route);
            }

            std::vector<ScoredRoute> remaining = std::move(d.remaining);
            if (trained())
                remaining = immune_screen(src, scored, std::move(remaining));

            std::erase_if(remaining, [&](const ScoredRoute& r) { return !clean_at(src, r.route); });
            if (remaining.empty())
            {
                investigate(res);
                continue;
            }

            const auto filtered = affinity_filter(remaining);
            const MatchResult m = match_select(filtered);
            remember_antigen(scored, m.chosen.route.id);
            memory(src).register_route(src, dst, m.chosen.route, m.fitness, m.chosen.th, w.clock());
            return m.chosen.route;
        }
        return std::nullopt;
    }

    /// Runs the negative-selection classifier on each remaining route. Antigens
    /// are normalized over the full scored candidate set.
    std::vector<ScoredRoute> immune_screen(UavId src, const std::vector<ScoredRoute>& scored,
                                           std::vector<ScoredRoute> remaining)
    {
        World& w = net_.world();
        std::vector<std::pair<std::uint64_t, RouteStats>> raw;
        for (const auto& s : scored)
            raw.emplace_back(s.route.id, s.stats);
        const auto antigens = make_antigens(raw);
        std::set<std::uint64_t> flagged;
        std::vector<ScoredRoute> held_back;
        for (const auto& a : antigens)
        {
            const bool kept = std::any_of(remaining.begin(), remaining.end(),
                                          [&](const ScoredRoute& r) { return r.route.id == a.route_id; });
            if (kept && classify(a, detectors_) == Verdict::NonSelfMalicious)
                flagged.insert(a.route_id);
        }
        std::vector<ScoredRoute> out;
        for (auto& r : remaining)
        {
            if (!flagged.contains(r.route.id))
            {
                out.push_back(std::move(r));
                continue;
            }
            w.trace().note(w.clock(), TraceEvent::DetectorFlag, src.value, r.route.dst.value,
                           static_cast<std::int64_t>(r.route.id), format_hops(r.route.hops));
            escalate(src, r.route);
            held_back.push_back(std::move(r));
        }
        // A flagged route is only dropped when something else remains.
        if (out.empty())
            out = std::move(held_back);
        return out;
    }

    void remember_antigen(const std::vector<ScoredRoute>& scored, std::uint64_t route_id)
    {
        std::vector<std::pair<std::uint64_t, RouteStats>> raw;
        for (const auto& s : scored)
            raw.emplace_back(s.route.id, s.stats);
        for (const auto& a : make_antigens(raw))
        {
            if (a.route_id == route_id)
                pending_self_ = a;
        }
    }

    void maybe_retrain(double now)
    {
        if (now - last_training_ < params_.kb.antigen_toward_min)
            return;
        train(now);
    }

    Network& net_;
    ProtocolParams params_;
    Rng detector_rng_;
    SelfSet self_;
    DetectorSet detectors_;
    double last_training_ = 0.0;
    bool collecting_ = false;
    std::map<UavId, SecurityMemory> memories_;
    std::optional<Antigen> pending_self_;
    std::vector<std::pair<UavId, Route>> suspects_;
};

} // namespace aspuavn
