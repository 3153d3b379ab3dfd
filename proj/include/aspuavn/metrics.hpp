#pragma once

// Run scoring: delivery ratios over experiments and a per-UAV confusion
// matrix built from isolation records against ground-truth labels.

#include "domain.hpp"
#include "trace.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace aspuavn
{

/// y = packets sent by the source, x = packets received at the destination,
/// one pair per experiment (a source-destination session).
struct ExperimentStats
{
    std::vector<std::pair<std::uint64_t, std::uint64_t>> experiments; // (y, x)

    void add(std::uint64_t sent, std::uint64_t received)
    {
        if (received > sent)
            throw ContractViolation("experiment received more packets than were sent");
        experiments.emplace_back(sent, received);
    }

    std::size_t n() const noexcept { return experiments.size(); }

    std::uint64_t total_sent() const noexcept
    {
        std::uint64_t s = 0;
        for (const auto& e : experiments)
            s += e.first;
        return s;
    }

    std::uint64_t total_received() const noexcept
    {
        std::uint64_t s = 0;
        for (const auto& e : experiments)
            s += e.second;
        return s;
    }
};

namespace detail
{
inline void require_traffic(const ExperimentStats& s)
{
    if (s.total_sent() == 0)
        throw ContractViolation("no packets were sent");
}
} // namespace detail

/// (1/n) * (sum x / sum y) * 100, with the 1/n prefactor kept literally.
inline double pdr(const ExperimentStats& s)
{
    detail::require_traffic(s);
    return 100.0 * (static_cast<double>(s.total_received()) / static_cast<double>(s.total_sent())) /
           static_cast<double>(s.n());
}

/// (1/n) * ((sum y - sum x) / sum y) * 100.
inline double plr(const ExperimentStats& s)
{
    detail::require_traffic(s);
    const double y = static_cast<double>(s.total_sent());
    return 100.0 * ((y - static_cast<double>(s.total_received())) / y) / static_cast<double>(s.n());
}

/// Conventional sum x / sum y * 100.
inline double pooled_pdr(const ExperimentStats& s)
{
    detail::require_traffic(s);
    return 100.0 * static_cast<double>(s.total_received()) / static_cast<double>(s.total_sent());
}

inline double pooled_plr(const ExperimentStats& s) { return 100.0 - pooled_pdr(s); }

struct ConfusionMatrix
{
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t all() const noexcept { return tp + tn + fp + fn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

/// Percent rates; std::nullopt marks an undefined rate (zero denominator).
struct Rates
{
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> dr;
};

inline Rates rates(const ConfusionMatrix& cm)
{
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    return {ratio(cm.fp, cm.fp + cm.tn), ratio(cm.fn, cm.fn + cm.tp), ratio(cm.tp, cm.tp + cm.fn)};
}

struct RunScore
{
    ExperimentStats stats;
    ConfusionMatrix cm;
    std::set<UavId> predicted_malicious;
};

/// Scores a finished trace. Experiments are sessions (DataSent / DataReceived
/// records keyed by session id). A UAV counts as predicted malicious once any
/// source isolated it; UAVs never isolated count as predicted normal.
inline RunScore score_run(const std::vector<TraceRecord>& trace, const std::vector<UavId>& population,
                          const std::set<UavId>& attackers)
{
    if (trace.empty() || trace.back().event != TraceEvent::RunEnd)
        throw Error("score_run: trace is truncated (no end-of-run record)");
    RunScore out;
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> sessions;
    for (const auto& r : trace)
    {
        switch (r.event)
        {
        case TraceEvent::DataSent: ++sessions[r.value].first; break;
        case TraceEvent::DataReceived: ++sessions[r.value].second; break;
        case TraceEvent::Isolated: out.predicted_malicious.insert(UavId{r.peer}); break;
        default: break;
        }
    }
    for (const auto& [id, yx] : sessions)
    {
        if (yx.first > 0)
            out.stats.add(yx.first, yx.second);
    }
    for (const UavId u : population)
    {
        const bool truth = attackers.contains(u);
        const bool pred = out.predicted_malicious.contains(u);
        if (truth && pred)
            ++out.cm.tp;
        else if (truth)
            ++out.cm.fn;
        else if (pred)
            ++out.cm.fp;
        else
            ++out.cm.tn;
    }
    return out;
}

} // namespace aspuavn
