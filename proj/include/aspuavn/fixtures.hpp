#pragma once

// Small deterministic topologies with known answers. The CLI's `fixture`
// command replays them as a smoke check; tests build on the same layouts.

#include "agents.hpp"
#include "analysis.hpp"
#include "routing.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace aspuavn
{

inline WorldConfig static_world(Box bounds, double range, double hop_delay = 0.005)
{
    WorldConfig wc;
    wc.bounds = bounds;
    wc.range = range;
    wc.hop_delay = hop_delay;
    wc.mobile = false;
    return wc;
}

/// `n` UAVs on the x axis, `spacing` apart. Node i has id i.
inline std::unique_ptr<Network> make_chain(std::size_t n, double spacing, double range, std::uint64_t seed = 1,
                                           double hop_delay = 0.005)
{
    const double len = spacing * static_cast<double>(n);
    auto net = std::make_unique<Network>(
        static_world(Box{{-1.0, -1.0, -1.0}, {len + 1.0, 1.0, 1.0}}, range, hop_delay), seed);
    for (std::size_t i = 0; i < n; ++i)
        net->world().add_node({spacing * static_cast<double>(i), 0.0, 0.0});
    return net;
}

/// Three lanes between S (node 0) and D (node 9), each on a 20 m circle in the
/// y-z plane. Lane A = 1,2,3; lane B = 4,5,6; lane C = 7,8. Range 30.
/// Node 5 is a selective forwarder with the given drop probability.
struct LaneFixture
{
    static constexpr UavId src{0};
    static constexpr UavId dst{9};
    static constexpr UavId attacker{5};
    static constexpr double range = 30.0;
};

inline std::unique_ptr<Network> make_lanes(std::uint64_t seed, double drop_probability = 1.0)
{
    constexpr double r = 20.0;
    auto lane = [](int k) {
        const double a = 2.0 * std::numbers::pi * k / 3.0;
        return std::pair{r * std::cos(a), r * std::sin(a)};
    };
    auto net = std::make_unique<Network>(
        static_world(Box{{-10.0, -30.0, -30.0}, {80.0, 30.0, 30.0}}, LaneFixture::range), seed);
    World& w = net->world();
    w.add_node({0.0, 0.0, 0.0});
    for (int k = 0; k < 2; ++k)
    {
        const auto [y, z] = lane(k);
        for (double x : {10.0, 35.0, 60.0})
        {
            const bool bad = k == 1 && x == 35.0;
            if (bad)
                w.add_node({x, y, z}, AttackerRole{SelectiveForwarding{drop_probability}});
            else
                w.add_node({x, y, z});
        }
    }
    const auto [y, z] = lane(2);
    w.add_node({20.0, y, z});
    w.add_node({48.0, y, z});
    w.add_node({68.0, 0.0, 0.0});
    net->activate_attacks(0.0);
    return net;
}

struct FixtureCheck
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Replays the built-in fixtures and reports each outcome.
inline std::vector<FixtureCheck> run_fixtures()
{
    std::vector<FixtureCheck> out;

    for (std::size_t n : {2u, 5u, 10u})
    {
        FixtureCheck c;
        c.name = "chain n=" + std::to_string(n);
        auto net = make_chain(n, 30.0, 30.0);
        const UavId src{0}, dst{static_cast<std::uint32_t>(n - 1)};
        const double t0 = net->clock();
        const auto routes = discover_routes(*net, src, dst);
        if (routes.size() != 1)
        {
            c.detail = "expected one route, got " + std::to_string(routes.size());
            out.push_back(c);
            continue;
        }
        const double hops = static_cast<double>(n - 1);
        const double rtt_expected = 2.0 * hops * net->hop_delay();
        net->send_hello(routes.front().route, 1);
        net->run_until(net->clock() + net->probe_timeout());
        const auto counts = measured_control_messages(net->world().trace().records(), t0, net->clock(), true);
        ComplexityInputs ci{hops * 30.0, 30.0, n, net->hop_delay()};
        const auto expected = static_cast<std::int64_t>(expected_message_complexity(ci));
        const auto measured = static_cast<std::int64_t>(counts.discovery_total());
        const bool rtt_ok = std::abs(routes.front().stats.rtt - rtt_expected) < 1e-9;
        c.passed = rtt_ok && std::llabs(measured - expected) <= 2;
        c.detail = "rtt=" + std::to_string(routes.front().stats.rtt) + " messages=" + std::to_string(measured) +
                   " expected=" + std::to_string(expected);
        out.push_back(c);
    }

    {
        FixtureCheck c;
        c.name = "lanes selective forwarder, 20 seeds";
        c.passed = true;
        for (std::uint64_t seed = 1; seed <= 20 && c.passed; ++seed)
        {
            auto net = make_lanes(seed);
            const auto routes = discover_routes(*net, LaneFixture::src, LaneFixture::dst);
            const auto ev = evaluate_routes(*net, routes, AgentParams{});
            std::size_t clean = 0;
            for (const auto& s : ev.survivors)
                clean += !s.route.contains(LaneFixture::attacker);
            const bool rejected_bad = ev.rejected.size() == 1 && ev.rejected.front().route.contains(LaneFixture::attacker);
            c.passed = routes.size() == 3 && rejected_bad && clean == 2 && ev.survivors.size() == 2;
            if (!c.passed)
                c.detail = "seed " + std::to_string(seed) + ": " + std::to_string(ev.survivors.size()) +
                           " survivors, " + std::to_string(ev.rejected.size()) + " rejected";
        }
        out.push_back(c);
    }
    return out;
}

} // namespace aspuavn
