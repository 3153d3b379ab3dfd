#pragma once

// Knowledge base: negative-selection detectors over normalized route
// behavior, affinity filtering, RTT/SSI fitness matching, hyper-mutation
// tie-breaking and the security memory of vetted routes.

#include "domain.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace aspuavn
{

inline constexpr std::size_t kAntigenDims = 6;
using Feature = std::array<double, kAntigenDims>;

struct KbConfig
{
    double antigen_collection_time = 15.0; // s of attack-free self-set collection
    double antigen_toward_min = 80.0;      // s minimum between detector retrainings
    std::size_t delay_buffer_max = 1400;   // per-route delay samples kept
    double storing_time = 10.0;            // s a vetted route stays usable
    std::size_t max_antigens = 1000;       // self-set cap

    void validate() const
    {
        if (!(antigen_collection_time > 0.0))
            throw ConfigError("antigen_collection_time", "must be positive");
        if (!(antigen_toward_min > 0.0))
            throw ConfigError("antigen_toward_min", "must be positive");
        if (delay_buffer_max == 0)
            throw ConfigError("delay_buffer_max", "must be positive");
        if (!(storing_time > 0.0))
            throw ConfigError("storing_time", "must be positive");
        if (max_antigens == 0)
            throw ConfigError("max_antigens", "must be positive");
    }
};

// ---------------------------------------------------------------------------
// Antigens
// ---------------------------------------------------------------------------

/// Route behavior as (delay, plr, 1-pdr, fsr, rtt, ssi), each divided by its
/// maximum over the candidate set.
struct Antigen
{
    Feature features{};
    Feature maxima{};
    std::uint64_t route_id = 0;
};

inline Feature raw_features(const RouteStats& s) noexcept
{
    return {s.delay, s.plr, 1.0 - s.pdr, s.fsr, s.rtt, s.ssi};
}

inline std::vector<Antigen> make_antigens(const std::vector<std::pair<std::uint64_t, RouteStats>>& routes)
{
    Feature maxima{};
    for (const auto& [id, s] : routes)
    {
        const Feature f = raw_features(s);
        for (std::size_t d = 0; d < kAntigenDims; ++d)
            maxima[d] = std::max(maxima[d], f[d]);
    }
    std::vector<Antigen> out;
    out.reserve(routes.size());
    for (const auto& [id, s] : routes)
    {
        Antigen a;
        a.route_id = id;
        a.maxima = maxima;
        const Feature f = raw_features(s);
        for (std::size_t d = 0; d < kAntigenDims; ++d)
            a.features[d] = maxima[d] > 0.0 ? std::clamp(f[d] / maxima[d], 0.0, 1.0) : 0.0;
        out.push_back(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Negative selection
// ---------------------------------------------------------------------------

struct Detector
{
    Feature center{};
    double radius = 0.15;

    bool matches(const Feature& x) const noexcept
    {
        double d2 = 0.0;
        for (std::size_t i = 0; i < kAntigenDims; ++i)
        {
            const double diff = center[i] - x[i];
            d2 += diff * diff;
        }
        return d2 <= radius * radius;
    }
};

struct DetectorSet
{
    std::vector<Detector> detectors;
    std::size_t target = 0;

    std::size_t size() const noexcept { return detectors.size(); }
    bool empty() const noexcept { return detectors.empty(); }
};

inline constexpr std::uint64_t kDefaultRejectionBudget = 1'000'000;

/// Generates `ni` random detectors in the unit cube, keeping only those that
/// match no self antigen.
inline DetectorSet train_detectors(const std::vector<Antigen>& self_set, std::size_t ni, double radius,
                                   Rng& rng, std::uint64_t rejection_budget = kDefaultRejectionBudget)
{
    if (ni == 0)
        throw ContractViolation("train_detectors: ni must be at least 1");
    if (self_set.empty())
        throw ContractViolation("train_detectors: self set is empty");
    if (!(radius > 0.0))
        throw ContractViolation("train_detectors: radius must be positive");

    DetectorSet set;
    set.target = ni;
    set.detectors.reserve(ni);
    std::uint64_t rejections = 0;
    while (set.detectors.size() < ni)
    {
        Detector d;
        d.radius = radius;
        for (auto& c : d.center)
            c = rng.uniform01();
        const bool self_match = std::any_of(self_set.begin(), self_set.end(),
                                            [&](const Antigen& s) { return d.matches(s.features); });
        if (self_match)
        {
            if (++rejections >= rejection_budget)
                throw Error("train_detectors: rejection budget exhausted; the self set covers the space");
            continue;
        }
        rejections = 0;
        set.detectors.push_back(d);
    }
    return set;
}

enum class Verdict : std::uint8_t
{
    SelfNormal,
    NonSelfMalicious,
};

inline Verdict classify(const Antigen& antigen, const DetectorSet& set)
{
    for (const auto& d : set.detectors)
    {
        if (d.matches(antigen.features))
            return Verdict::NonSelfMalicious;
    }
    return Verdict::SelfNormal;
}

/// One detector per line: six center coordinates then the radius.
inline void write_detectors(std::ostream& os, const DetectorSet& set)
{
    char buf[32];
    for (const auto& d : set.detectors)
    {
        for (double c : d.center)
        {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            os << buf << ' ';
        }
        std::snprintf(buf, sizeof buf, "%.17g", d.radius);
        os << buf << '\n';
    }
}

inline DetectorSet read_detectors(std::istream& is)
{
    DetectorSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        Detector d;
        for (auto& c : d.center)
        {
            if (!(ls >> c))
                throw Error("detector file line " + std::to_string(lineno) + ": expected 7 numbers");
        }
        if (!(ls >> d.radius) || !(d.radius > 0.0))
            throw Error("detector file line " + std::to_string(lineno) + ": bad radius");
        set.detectors.push_back(d);
    }
    set.target = set.detectors.size();
    return set;
}

// ---------------------------------------------------------------------------
// Affinity, matching and hyper-mutation
// ---------------------------------------------------------------------------

struct ScoredRoute
{
    Route route;
    RouteStats stats;
    double th = 0.0;
};

inline constexpr double kThTieTolerance = 1e-6;

/// Keeps routes whose threshold is at most the median threshold.
inline std::vector<ScoredRoute> affinity_filter(const std::vector<ScoredRoute>& routes)
{
    if (routes.empty())
        throw ContractViolation("affinity_filter: no routes");
    std::vector<double> th;
    th.reserve(routes.size());
    for (const auto& r : routes)
        th.push_back(r.th);
    std::sort(th.begin(), th.end());
    const std::size_t n = th.size();
    const double median = n % 2 ? th[n / 2] : 0.5 * (th[n / 2 - 1] + th[n / 2]);
    std::vector<ScoredRoute> out;
    for (const auto& r : routes)
    {
        if (r.th <= median + kThTieTolerance)
            out.push_back(r);
    }
    return out;
}

/// F_r = MaxRTT / RTT_i + SSI_i / MaxSSI.
inline double fitness(double rtt_i, double ssi_i, double max_rtt, double max_ssi)
{
    if (!(rtt_i > 0.0))
        throw ContractViolation("fitness: route RTT not measured");
    if (!(max_ssi > 0.0))
        throw ContractViolation("fitness: MaxSSI must be positive");
    return max_rtt / rtt_i + ssi_i / max_ssi;
}

/// Among tied routes, highest PDR wins; remaining ties go to the lowest id.
inline ScoredRoute hyper_mutate(const std::vector<ScoredRoute>& tied)
{
    if (tied.empty())
        throw ContractViolation("hyper_mutate: no routes");
    return *std::min_element(tied.begin(), tied.end(), [](const ScoredRoute& a, const ScoredRoute& b) {
        if (a.stats.pdr != b.stats.pdr)
            return a.stats.pdr > b.stats.pdr;
        return a.route.id < b.route.id;
    });
}

struct MatchResult
{
    ScoredRoute chosen;
    double fitness = 0.0;
    bool hyper_mutated = false;
};

/// Minimum threshold first, then maximum fitness; remaining ties are
/// resolved by hyper-mutation.
inline MatchResult match_select(const std::vector<ScoredRoute>& candidates)
{
    if (candidates.empty())
        throw ContractViolation("match_select: no candidates");
    if (candidates.size() == 1)
    {
        const auto& c = candidates.front();
        const double f = c.stats.rtt > 0.0 && c.stats.ssi > 0.0 ? fitness(c.stats.rtt, c.stats.ssi, c.stats.rtt, c.stats.ssi) : 0.0;
        return {c, f, false};
    }
    double min_th = candidates.front().th;
    for (const auto& c : candidates)
        min_th = std::min(min_th, c.th);
    std::vector<ScoredRoute> best;
    for (const auto& c : candidates)
    {
        if (c.th <= min_th + kThTieTolerance)
            best.push_back(c);
    }
    double max_rtt = 0.0;
    double max_ssi = 0.0;
    for (const auto& c : best)
    {
        max_rtt = std::max(max_rtt, c.stats.rtt);
        max_ssi = std::max(max_ssi, c.stats.ssi);
    }
    std::vector<double> fr;
    for (const auto& c : best)
        fr.push_back(c.stats.rtt > 0.0 && max_ssi > 0.0 ? fitness(c.stats.rtt, c.stats.ssi, max_rtt, max_ssi) : 0.0);
    const double max_fr = *std::max_element(fr.begin(), fr.end());
    std::vector<ScoredRoute> tied;
    for (std::size_t i = 0; i < best.size(); ++i)
    {
        if (fr[i] >= max_fr - kThTieTolerance)
            tied.push_back(best[i]);
    }
    if (tied.size() == 1)
        return {tied.front(), max_fr, false};
    return {hyper_mutate(tied), max_fr, true};
}

// ---------------------------------------------------------------------------
// Security memory
// ---------------------------------------------------------------------------

struct StoredRoute
{
    Route route;
    double fitness = 0.0;
    double th = 0.0;
    double registered_at = 0.0;
};

class SecurityMemory
{
public:
    explicit SecurityMemory(double storing_time = 10.0) : storing_time_(storing_time) {}

    void register_route(UavId src, UavId dst, const Route& route, double fitness, double th, double now)
    {
        for (auto h : route.hops)
        {
            if (blacklist_.contains(h))
                throw ContractViolation("security memory: route " + std::to_string(route.id) +
                                        " contains blacklisted UAV " + std::to_string(h.value));
        }
        routes_[{src, dst}] = StoredRoute{route, fitness, th, now};
    }

    /// Stored route if still fresh and blacklist-clean.
    std::optional<Route> lookup(UavId src, UavId dst, double now) const
    {
        auto it = routes_.find({src, dst});
        if (it == routes_.end())
            return std::nullopt;
        const auto& s = it->second;
        if (!(now - s.registered_at < storing_time_))
            return std::nullopt;
        for (auto h : s.route.hops)
        {
            if (blacklist_.contains(h))
                return std::nullopt;
        }
        return s.route;
    }

    void blacklist(UavId uav)
    {
        blacklist_.insert(uav);
        std::erase_if(routes_, [&](const auto& kv) { return kv.second.route.contains(uav); });
    }

    bool is_blacklisted(UavId uav) const { return blacklist_.contains(uav); }
    const std::set<UavId>& blacklisted() const noexcept { return blacklist_; }
    std::size_t size() const noexcept { return routes_.size(); }
    double storing_time() const noexcept { return storing_time_; }

private:
    double storing_time_;
    std::map<std::pair<UavId, UavId>, StoredRoute> routes_;
    std::set<UavId> blacklist_;
};

/// Self antigens gathered during attack-free operation.
class SelfSet
{
public:
    explicit SelfSet(std::size_t cap = 1000) : cap_(cap) {}

    /// Returns false once the cap is reached.
    bool add(const Antigen& a)
    {
        if (antigens_.size() >= cap_)
            return false;
        antigens_.push_back(a);
        return true;
    }

    const std::vector<Antigen>& antigens() const noexcept { return antigens_; }
    std::size_t size() const noexcept { return antigens_.size(); }
    bool full() const noexcept { return antigens_.size() >= cap_; }

private:
    std::size_t cap_;
    std::vector<Antigen> antigens_;
};

} // namespace aspuavn
