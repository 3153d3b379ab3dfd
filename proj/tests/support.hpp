#pragma once

// Test-only helpers: trace queries and brute-force graph oracles that do not
// reuse the simulator's own routing code.

#include <aspuavn/aspuavn.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace support
{

using namespace aspuavn;

inline std::size_t count_events(const std::vector<TraceRecord>& records, TraceEvent e)
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [&](const TraceRecord& r) { return r.event == e; }));
}

inline std::size_t count_events(const World& w, TraceEvent e)
{
    return count_events(w.trace().records(), e);
}

/// Adjacency matrix from raw positions.
inline std::vector<std::vector<bool>> unit_disk(const std::vector<Position3>& pos, double range)
{
    const std::size_t n = pos.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y, dz = pos[i].z - pos[j].z;
            adj[i][j] = i != j && dx * dx + dy * dy + dz * dz <= range * range;
        }
    }
    return adj;
}

inline std::vector<Position3> positions(const World& w)
{
    std::vector<Position3> out;
    for (const auto& n : w.nodes())
        out.push_back(n.position);
    return out;
}

/// Every simple path from s to t, by exhaustive DFS.
inline std::set<std::vector<std::uint32_t>> all_simple_paths(const std::vector<std::vector<bool>>& adj,
                                                            std::uint32_t s, std::uint32_t t)
{
    std::set<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> path{s};
    std::vector<bool> on(adj.size(), false);
    on[s] = true;
    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t u) {
        if (u == t)
        {
            out.insert(path);
            return;
        }
        for (std::uint32_t v = 0; v < adj.size(); ++v)
        {
            if (adj[u][v] && !on[v])
            {
                on[v] = true;
                path.push_back(v);
                dfs(v);
                path.pop_back();
                on[v] = false;
            }
        }
    };
    dfs(s);
    return out;
}

/// Hop distance from s to t, or nullopt when disconnected.
inline std::optional<std::size_t> bfs_hops(const std::vector<std::vector<bool>>& adj, std::uint32_t s,
                                           std::uint32_t t)
{
    std::vector<int> dist(adj.size(), -1);
    std::deque<std::uint32_t> q{s};
    dist[s] = 0;
    while (!q.empty())
    {
        const auto u = q.front();
        q.pop_front();
        if (u == t)
            return static_cast<std::size_t>(dist[u]);
        for (std::uint32_t v = 0; v < adj.size(); ++v)
        {
            if (adj[u][v] && dist[v] < 0)
            {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    return std::nullopt;
}

inline std::vector<std::uint32_t> raw(const Route& r)
{
    std::vector<std::uint32_t> out;
    for (auto h : r.hops)
        out.push_back(h.value);
    return out;
}

inline Route route_of(std::uint64_t id, std::initializer_list<std::uint32_t> hops)
{
    std::vector<UavId> v;
    for (auto h : hops)
        v.push_back(UavId{h});
    return make_route(id, v);
}

} // namespace support
