#include "support.hpp"

#include <gtest/gtest.h>

using namespace aspuavn;
using namespace support;

TEST(SfOnRreq, ForgedReplyOutbidsBySequenceBoost)
{
    Rreq rreq{4, UavId{0}, UavId{9}, 2, {UavId{0}, UavId{1}}, 7};
    const Packet p = sf_on_rreq(UavId{5}, rreq, 0, AttackConfig{}, 1.0);
    const auto& rep = std::get<Rrep>(p.body);
    EXPECT_EQ(rep.dst_seq, 107u);
    EXPECT_EQ(rep.hop_count, 1u);
    EXPECT_EQ(rep.route, (std::vector<UavId>{UavId{0}, UavId{1}, UavId{5}, UavId{9}}));
    EXPECT_EQ(p.path, (std::vector<UavId>{UavId{5}, UavId{1}, UavId{0}}));
}

TEST(SfOnRreq, UsesHighestSequenceOverheard)
{
    Rreq rreq{4, UavId{0}, UavId{9}, 0, {UavId{0}}, 3};
    EXPECT_EQ(std::get<Rrep>(sf_on_rreq(UavId{5}, rreq, 40, AttackConfig{}, 0.0).body).dst_seq, 140u);
}

TEST(SfOnRreq, AttackerOutsideTheFloodNeverForges)
{
    Network net(static_world(Box{{-1, -1, -1}, {600, 1, 1}}, 30.0), 1);
    for (int i = 0; i < 4; ++i)
        net.world().add_node({25.0 * i, 0, 0});
    net.world().add_node({500, 0, 0}, AttackerRole{SelectiveForwarding{1.0}});
    net.activate_attacks(0.0);
    discover_routes(net, UavId{0}, UavId{3});
    EXPECT_EQ(count_events(net.world(), TraceEvent::Forged), 0u);
}

TEST(SfOnRreq, DuplicateRreqCopiesForgeOnce)
{
    // The attacker (3) hears the same request from both 1 and 2.
    Network net(static_world(Box{{-50, -50, -50}, {200, 50, 50}}, 30.0), 1);
    net.world().add_node({0, 0, 0});
    net.world().add_node({20, 10, 0});
    net.world().add_node({20, -10, 0});
    net.world().add_node({40, 0, 0}, AttackerRole{SelectiveForwarding{1.0}});
    net.world().add_node({150, 0, 0});
    net.activate_attacks(0.0);
    discover_routes(net, UavId{0}, UavId{4});
    EXPECT_EQ(count_events(net.world(), TraceEvent::Forged), 1u);
}

TEST(SfOnData, ExtremeProbabilitiesAreDeterministic)
{
    Rng rng(1);
    for (int i = 0; i < 1000; ++i)
    {
        EXPECT_EQ(sf_on_data(1.0, rng), ForwardDecision::Drop);
        EXPECT_EQ(sf_on_data(0.0, rng), ForwardDecision::Forward);
    }
}

TEST(SfOnData, HalfProbabilityWithinThreeSigma)
{
    Rng rng(12345, Stream::Adversary);
    int drops = 0;
    for (int i = 0; i < 10000; ++i)
        drops += sf_on_data(0.5, rng) == ForwardDecision::Drop;
    EXPECT_GE(drops, 4700);
    EXPECT_LE(drops, 5300);
}

TEST(Wormhole, TunnelPreservesHopCount)
{
    Rreq in{1, UavId{0}, UavId{9}, 2, {UavId{0}, UavId{1}}, 0};
    const Rreq out = wh_tunnel_exit(in, UavId{2}, UavId{7});
    EXPECT_EQ(out.hop_count, 2u);
    EXPECT_EQ(out.path_so_far.back(), UavId{7});
}

TEST(Wormhole, LongTunnelBeatsEveryLegitimatePath)
{
    // A 800 m chain with tunnel ends next to each endpoint.
    const std::uint32_t n = 33;
    Network net(static_world(Box{{-10, -30, -10}, {820, 30, 10}}, 30.0), 1);
    for (std::uint32_t i = 0; i < n; ++i)
        net.world().add_node({25.0 * i, 0, 0});
    const UavId a = net.world().add_node({5, 20, 0}, AttackerRole{Wormhole{UavId{n + 1}}});
    net.world().add_node({25.0 * (n - 1) - 5, 20, 0}, AttackerRole{Wormhole{a}});
    net.activate_attacks(0.0);

    const auto adj = unit_disk(positions(net.world()), 30.0);
    const auto honest = bfs_hops(adj, 0, n - 1);
    ASSERT_TRUE(honest.has_value());

    const auto routes = discover_routes(net, UavId{0}, UavId{n - 1});
    ASSERT_FALSE(routes.empty());
    std::size_t shortest = SIZE_MAX;
    for (const auto& r : routes)
        shortest = std::min(shortest, r.route.hop_count());
    EXPECT_LT(shortest, *honest);
    EXPECT_GT(count_events(net.world(), TraceEvent::Tunneled), 0u);
}

TEST(Wormhole, DataHeadedIntoTheTunnelIsDropped)
{
    Rng rng(1);
    const AttackKind wh = Wormhole{UavId{8}};
    EXPECT_EQ(attacker_data_decision(wh, UavId{8}, rng), ForwardDecision::Drop);
    EXPECT_EQ(attacker_data_decision(wh, UavId{3}, rng), ForwardDecision::Forward);
}

TEST(Sinkhole, AdjacentSinkholeClaimsTwoHopRoutesToProbedDestinations)
{
    Network net(static_world(Box{{-50, -50, -50}, {200, 50, 50}}, 30.0), 1);
    net.world().add_node({0, 0, 0});                      // 0 source
    net.world().add_node({0, 20, 0}, AttackerRole{Sinkhole{}}); // 1
    net.world().add_node({25, 0, 0});                     // 2
    net.world().add_node({50, 0, 0});                     // 3
    net.world().add_node({75, 0, 0});                     // 4
    net.activate_attacks(0.0);
    for (std::uint32_t d : {2u, 3u, 4u})
    {
        discover_routes(net, UavId{0}, UavId{d});
        const auto& entries = net.world().node(UavId{0}).table.entries(UavId{0}, UavId{d});
        const bool forged = std::any_of(entries.begin(), entries.end(), [&](const RouteEntry& e) {
            return raw(e.route) == std::vector<std::uint32_t>{0, 1, d};
        });
        EXPECT_TRUE(forged) << "destination " << d;
    }
}

TEST(Sinkhole, AdvertisementsNeedOverheardDestinations)
{
    AttackerMemory mem;
    EXPECT_TRUE(sh_advertise(UavId{1}, mem, AttackConfig{}, 5.0).empty());

    Network net(static_world(Box{{-50, -50, -50}, {200, 50, 50}}, 30.0), 1);
    net.world().add_node({0, 0, 0});
    net.world().add_node({20, 0, 0}, AttackerRole{Sinkhole{}});
    net.activate_attacks(0.0);
    net.run_until(5.0);
    EXPECT_EQ(count_events(net.world(), TraceEvent::Advertised), 0u);
}

TEST(Sinkhole, AdvertisesRecentDestinationsPeriodically)
{
    AttackerMemory mem;
    remember_rreq(mem, Rreq{1, UavId{0}, UavId{4}, 0, {UavId{0}}, 3}, 1.0);
    const auto ads = sh_advertise(UavId{1}, mem, AttackConfig{}, 2.0);
    ASSERT_EQ(ads.size(), 1u);
    EXPECT_EQ(std::get<Rrep>(ads[0].body).dst_seq, 103u);
    EXPECT_TRUE(sh_advertise(UavId{1}, mem, AttackConfig{}, 20.0).empty());
}

TEST(Sinkhole, BlacklistedSinkholeIsIgnored)
{
    Network net(static_world(Box{{-50, -50, -50}, {200, 50, 50}}, 30.0), 1);
    net.world().add_node({0, 0, 0});
    net.world().add_node({0, 20, 0}, AttackerRole{Sinkhole{}});
    net.world().add_node({25, 0, 0});
    net.world().add_node({50, 0, 0});
    net.activate_attacks(0.0);
    net.world().node(UavId{0}).blacklist.insert(UavId{1});
    const auto routes = discover_routes(net, UavId{0}, UavId{3});
    ASSERT_FALSE(routes.empty());
    for (const auto& r : routes)
        EXPECT_FALSE(r.route.contains(UavId{1}));
}

TEST(AssignAttackers, CountAndWormholePairing)
{
    std::vector<UavId> ids;
    for (std::uint32_t i = 0; i < 100; ++i)
        ids.push_back(UavId{i});
    AttackConfig cfg;
    cfg.malicious_fraction = 20.0;
    cfg.kinds_enabled = {AttackType::Wormhole, AttackType::SelectiveForwarding, AttackType::Sinkhole};
    Rng rng(3, Stream::Roles);
    const auto roles = assign_attackers(ids, cfg, rng);
    EXPECT_EQ(roles.size(), 20u);
    for (const auto& [id, role] : roles)
    {
        if (const auto* wh = std::get_if<Wormhole>(&role.kind))
        {
            ASSERT_TRUE(roles.contains(wh->peer));
            EXPECT_EQ(std::get<Wormhole>(roles.at(wh->peer).kind).peer, id);
        }
    }
}

TEST(AssignAttackers, SameSeedSameAssignment)
{
    std::vector<UavId> ids;
    for (std::uint32_t i = 0; i < 50; ++i)
        ids.push_back(UavId{i});
    AttackConfig cfg;
    cfg.malicious_fraction = 10.0;
    Rng a(8, Stream::Roles), b(8, Stream::Roles);
    const auto ra = assign_attackers(ids, cfg, a);
    const auto rb = assign_attackers(ids, cfg, b);
    ASSERT_EQ(ra.size(), rb.size());
    for (const auto& [id, role] : ra)
        EXPECT_TRUE(rb.contains(id));
}

TEST(AttackFree, NoAttackerRecordsAppear)
{
    ScenarioConfig c = desk_scenario();
    c.malicious = 0.0;
    c.sim_time = 40.0;
    RunArtifacts art;
    run_scenario(c, {2, 100, true}, {}, &art);
    for (auto e : {TraceEvent::Forged, TraceEvent::AttackDrop, TraceEvent::Tunneled, TraceEvent::Advertised})
        EXPECT_EQ(count_events(art.records, e), 0u);
    EXPECT_TRUE(art.attackers.empty());
}
