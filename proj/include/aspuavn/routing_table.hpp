#pragma once

#include "domain.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace aspuavn
{

inline constexpr std::size_t kDefaultCandidateRoutes = 3;

struct RouteEntry
{
    Route route;
    RouteStats stats;
    double discovered_at = 0.0;
    std::uint64_t dst_seq = 0;
    std::uint32_t claimed_hops = 0;
    bool advertised = false; // learned from an unsolicited RREP broadcast
};

/// Candidate routes per (src, dst), capped at `capacity` entries.
class RoutingTable
{
public:
    using Key = std::pair<UavId, UavId>;

    explicit RoutingTable(std::size_t capacity = kDefaultCandidateRoutes) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    void set_capacity(std::size_t k) { capacity_ = k; }

    const std::vector<RouteEntry>& entries(UavId src, UavId dst) const
    {
        static const std::vector<RouteEntry> empty;
        auto it = table_.find({src, dst});
        return it == table_.end() ? empty : it->second;
    }

    /// Inserts or refreshes an entry. When full, the least attractive entry
    /// (lowest sequence number, then most hops, then oldest) is evicted if
    /// the newcomer beats it.
    void upsert(UavId src, UavId dst, RouteEntry entry)
    {
        auto& v = table_[{src, dst}];
        for (auto& e : v)
        {
            if (e.route.hops == entry.route.hops)
            {
                e = std::move(entry);
                return;
            }
        }
        if (v.size() < capacity_)
        {
            v.push_back(std::move(entry));
            return;
        }
        auto worst = std::min_element(v.begin(), v.end(), [](const RouteEntry& a, const RouteEntry& b) {
            return more_attractive(b, a);
        });
        if (worst != v.end() && more_attractive(entry, *worst))
            *worst = std::move(entry);
    }

    void replace(UavId src, UavId dst, std::vector<RouteEntry> entries)
    {
        if (entries.size() > capacity_)
            entries.resize(capacity_);
        table_[{src, dst}] = std::move(entries);
    }

    void erase_containing(UavId uav)
    {
        for (auto& [key, v] : table_)
            std::erase_if(v, [&](const RouteEntry& e) { return e.route.contains(uav); });
    }

    void clear(UavId src, UavId dst) { table_.erase({src, dst}); }

    std::size_t size() const noexcept
    {
        std::size_t n = 0;
        for (const auto& [k, v] : table_)
            n += v.size();
        return n;
    }

    /// Freshness order used by plain on-demand routing: higher destination
    /// sequence wins, then fewer hops, then earlier discovery.
    static bool more_attractive(const RouteEntry& a, const RouteEntry& b) noexcept
    {
        if (a.dst_seq != b.dst_seq)
            return a.dst_seq > b.dst_seq;
        if (a.claimed_hops != b.claimed_hops)
            return a.claimed_hops < b.claimed_hops;
        return a.discovered_at < b.discovered_at;
    }

private:
    std::size_t capacity_;
    std::map<Key, std::vector<RouteEntry>> table_;
};

/// Flood suppression: a node relays a given (rreq id, origin) at most once.
class RreqCache
{
public:
    /// Returns true the first time the pair is seen.
    bool insert(std::uint64_t rreq_id, UavId origin) { return seen_.insert({rreq_id, origin}).second; }
    bool contains(std::uint64_t rreq_id, UavId origin) const { return seen_.contains({rreq_id, origin}); }

private:
    std::set<std::pair<std::uint64_t, UavId>> seen_;
};

} // namespace aspuavn
