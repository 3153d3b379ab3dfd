#pragma once

// Wormhole, selective-forwarding and sinkhole behaviors as per-node policies.
// These functions are only reached from the packet handler for nodes whose
// role is an attacker; defense code never consults roles.

#include "domain.hpp"
#include "rng.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aspuavn
{

enum class AttackType : std::uint8_t
{
    Wormhole,
    SelectiveForwarding,
    Sinkhole,
};

inline const char* to_string(AttackType t) noexcept
{
    switch (t)
    {
    case AttackType::Wormhole: return "WH";
    case AttackType::SelectiveForwarding: return "SF";
    case AttackType::Sinkhole: return "SH";
    }
    return "?";
}

inline AttackType parse_attack_type(const std::string& s)
{
    if (s == "WH" || s == "wh" || s == "wormhole")
        return AttackType::Wormhole;
    if (s == "SF" || s == "sf" || s == "selective-forwarding")
        return AttackType::SelectiveForwarding;
    if (s == "SH" || s == "sh" || s == "sinkhole")
        return AttackType::Sinkhole;
    throw ConfigError("attack", "unknown attack kind '" + s + "'");
}

struct AttackConfig
{
    double malicious_fraction = 0.0; // percent
    std::set<AttackType> kinds_enabled{AttackType::SelectiveForwarding};
    double sf_drop_probability = 1.0;
    double wh_tunnel_delay = 0.0;   // s
    std::uint64_t forged_seq_boost = 100;
    std::uint32_t forged_hop_count = 1;
    double sh_advertise_period = 1.0; // s
    double sh_memory = 10.0;          // s a seen destination stays advertised

    void validate() const
    {
        if (!(malicious_fraction >= 0.0 && malicious_fraction < 100.0))
            throw ConfigError("malicious_fraction", "must lie in [0, 100)");
        if (!(sf_drop_probability >= 0.0 && sf_drop_probability <= 1.0))
            throw ConfigError("sf_drop_probability", "must lie in [0, 1]");
        if (!(wh_tunnel_delay >= 0.0))
            throw ConfigError("wh_tunnel_delay", "must be non-negative");
        if (malicious_fraction > 0.0 && kinds_enabled.empty())
            throw ConfigError("attack", "malicious nodes requested but no attack kind enabled");
        if (!(sh_advertise_period > 0.0))
            throw ConfigError("sh_advertise_period", "must be positive");
    }
};

/// Picks attackers uniformly among `eligible` and assigns kinds round-robin
/// over the enabled set. Wormholes are always created as symmetric pairs.
inline std::map<UavId, AttackerRole> assign_attackers(std::vector<UavId> eligible,
                                                      const AttackConfig& cfg, Rng& rng)
{
    std::map<UavId, AttackerRole> out;
    if (cfg.malicious_fraction <= 0.0 || cfg.kinds_enabled.empty() || eligible.empty())
        return out;
    std::size_t count = static_cast<std::size_t>(
        std::llround(cfg.malicious_fraction / 100.0 * static_cast<double>(eligible.size())));
    count = std::min(count, eligible.size());
    // Fisher-Yates with the seeded stream.
    for (std::size_t i = eligible.size(); i > 1; --i)
        std::swap(eligible[i - 1], eligible[rng.below(i)]);

    const std::vector<AttackType> kinds(cfg.kinds_enabled.begin(), cfg.kinds_enabled.end());
    if (kinds.size() == 1 && kinds.front() == AttackType::Wormhole && count % 2 == 1)
        count = count + 1 <= eligible.size() ? count + 1 : count - 1;

    std::size_t next = 0;
    std::size_t k = 0;
    std::size_t stalls = 0;
    while (next < count && stalls < kinds.size())
    {
        const AttackType t = kinds[k % kinds.size()];
        ++k;
        if (t == AttackType::Wormhole)
        {
            if (count - next < 2)
            {
                ++stalls;
                continue;
            }
            const UavId a = eligible[next++];
            const UavId b = eligible[next++];
            out[a] = AttackerRole{Wormhole{b}};
            out[b] = AttackerRole{Wormhole{a}};
        }
        else if (t == AttackType::SelectiveForwarding)
            out[eligible[next++]] = AttackerRole{SelectiveForwarding{cfg.sf_drop_probability}};
        else
            out[eligible[next++]] = AttackerRole{Sinkhole{}};
        stalls = 0;
    }
    return out;
}

/// What an attacker remembers from overheard route requests.
struct AttackerMemory
{
    std::map<UavId, std::uint64_t> highest_seq; // per destination
    std::map<UavId, double> last_seen;          // destination -> time
};

inline void remember_rreq(AttackerMemory& mem, const Rreq& rreq, double now)
{
    auto& s = mem.highest_seq[rreq.dst];
    s = std::max(s, rreq.dst_seq);
    mem.last_seen[rreq.dst] = now;
}

/// Forged route reply: the attacker claims to sit one hop from the
/// destination with a very fresh sequence number. Returned packet is ready to
/// unicast back along the reverse path (path[1] is the next hop).
inline Packet sf_on_rreq(UavId attacker, const Rreq& rreq, std::uint64_t highest_seen_seq,
                         const AttackConfig& cfg, double now)
{
    Rrep rep;
    rep.route = rreq.path_so_far;
    rep.route.push_back(attacker);
    rep.route.push_back(rreq.dst);
    rep.dst_seq = std::max(rreq.dst_seq, highest_seen_seq) + cfg.forged_seq_boost;
    rep.hop_count = cfg.forged_hop_count;
    rep.rreq_id = rreq.id;

    Packet p;
    p.origin = attacker;
    p.timestamp = now;
    p.path.push_back(attacker);
    for (auto it = rreq.path_so_far.rbegin(); it != rreq.path_so_far.rend(); ++it)
        p.path.push_back(*it);
    p.cursor = 0;
    p.body = std::move(rep);
    return p;
}

enum class ForwardDecision : std::uint8_t
{
    Forward,
    Drop,
};

inline ForwardDecision sf_on_data(double drop_probability, Rng& rng)
{
    return rng.bernoulli(drop_probability) ? ForwardDecision::Drop : ForwardDecision::Forward;
}

/// Data-plane decision for an attacker holding a source-routed packet whose
/// next hop is `next`.
inline ForwardDecision attacker_data_decision(const AttackKind& kind, std::optional<UavId> next,
                                              Rng& rng)
{
    if (auto* sf = std::get_if<SelectiveForwarding>(&kind))
        return sf_on_data(sf->drop_probability, rng);
    if (std::holds_alternative<Sinkhole>(kind))
        return ForwardDecision::Drop;
    const auto& wh = std::get<Wormhole>(kind);
    return next && *next == wh.peer ? ForwardDecision::Drop : ForwardDecision::Forward;
}

/// RREQ copy emitted at the far end of a tunnel: the exit node is appended
/// to the path but the hop count is left as it was when the packet entered.
inline Rreq wh_tunnel_exit(const Rreq& entered_at_a, UavId a, UavId b)
{
    Rreq out = entered_at_a;
    out.path_so_far.push_back(a);
    out.path_so_far.push_back(b);
    return out;
}

/// Unsolicited attractive route replies for destinations overheard within
/// the memory window. Each is a one-entry-path broadcast.
inline std::vector<Packet> sh_advertise(UavId attacker, const AttackerMemory& mem,
                                        const AttackConfig& cfg, double now)
{
    std::vector<Packet> out;
    for (const auto& [dst, seen] : mem.last_seen)
    {
        if (dst == attacker || now - seen > cfg.sh_memory)
            continue;
        Rrep rep;
        rep.route = {attacker, dst};
        auto it = mem.highest_seq.find(dst);
        rep.dst_seq = (it == mem.highest_seq.end() ? 0 : it->second) + cfg.forged_seq_boost;
        rep.hop_count = cfg.forged_hop_count;
        Packet p;
        p.origin = attacker;
        p.timestamp = now;
        p.path = {attacker};
        p.cursor = 0;
        p.body = std::move(rep);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace aspuavn
