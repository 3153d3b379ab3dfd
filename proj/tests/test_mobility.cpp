#include <aspuavn/engine.hpp>
#include <aspuavn/mobility.hpp>

#include <gtest/gtest.h>

#include <array>
#include <numbers>

using namespace aspuavn;

TEST(SmoothTurn, StraightStepAdvancesSpeedTimesDt)
{
    StState st;
    st.heading = {1, 0, 0};
    st.mode = StraightMode{10.0};
    st.speed = 180.0;
    Rng rng(1);
    const auto [pos, next] = st_step({5, 5, 5}, st, 0.1, rng, MobilityParams{});
    EXPECT_NEAR(pos.x, 5.0 + 18.0, 1e-12);
    EXPECT_DOUBLE_EQ(pos.y, 5.0);
    EXPECT_DOUBLE_EQ(pos.z, 5.0);
    EXPECT_NEAR(std::get<StraightMode>(next.mode).remaining, 9.9, 1e-12);
}

TEST(SmoothTurn, HalfCircleDisplacementIsTheDiameter)
{
    const double r = 250.0, speed = 180.0;
    const double omega = speed / r;
    StState st;
    st.heading = {1, 0, 0};
    st.speed = speed;
    st.mode = TurningMode{{0, r, 0}, r, omega, std::numbers::pi / omega};
    Rng rng(1);
    const auto [pos, next] = st_step({0, 0, 0}, st, std::numbers::pi / omega, rng, MobilityParams{});
    EXPECT_NEAR(distance({0, 0, 0}, pos), 2.0 * r, 1e-9);
    EXPECT_NEAR(next.heading.x, -1.0, 1e-9);
}

TEST(SmoothTurn, SameSeedSameTrajectory)
{
    MobilityParams mp;
    auto trajectory = [&](std::uint64_t seed) {
        Rng rng(seed, Stream::Mobility);
        Position3 p{500, 500, 50};
        StState st = initial_st_state(p, rng, mp);
        std::vector<Position3> out;
        const Box box{{0, 0, 0}, {1000, 1000, 100}};
        for (int i = 0; i < 500; ++i)
        {
            std::tie(p, st) = st_step(p, st, 0.1, rng, mp, &box);
            out.push_back(p);
        }
        return out;
    };
    EXPECT_EQ(trajectory(3), trajectory(3));
    EXPECT_NE(trajectory(3), trajectory(4));
}

TEST(SmoothTurn, StepNeverExceedsSpeedTimesDt)
{
    MobilityParams mp;
    const Box box{{0, 0, 0}, {400, 400, 100}};
    Rng rng(17, Stream::Mobility);
    for (int node = 0; node < 20; ++node)
    {
        Position3 p{rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(0, 100)};
        StState st = initial_st_state(p, rng, mp);
        for (int i = 0; i < 2000; ++i)
        {
            const auto [q, next] = st_step(p, st, 0.1, rng, mp, &box);
            ASSERT_LE(distance(p, q), mp.speed * 0.1 + 1e-6);
            ASSERT_TRUE(box.contains(q));
            ASSERT_EQ(next.speed, mp.speed);
            if (auto* t = std::get_if<TurningMode>(&next.mode))
            {
                ASSERT_GT(t->radius, 0.0);
            }
            p = q;
            st = next;
        }
    }
}

TEST(SmoothTurn, HeadingChangesContinuously)
{
    // No straight/turn transition may rotate the heading by more than the
    // arc swept in one step.
    MobilityParams mp;
    Rng rng(23, Stream::Mobility);
    Position3 p{0, 0, 0};
    StState st = initial_st_state(p, rng, mp);
    const double max_turn = mp.speed * 0.1 / mp.radius_min + 1e-9;
    for (int i = 0; i < 5000; ++i)
    {
        const Vec3 h0 = st.heading;
        std::tie(p, st) = st_step(p, st, 0.1, rng, mp);
        const double cosang = std::clamp(h0.x * st.heading.x + h0.y * st.heading.y + h0.z * st.heading.z, -1.0, 1.0);
        ASSERT_LE(std::acos(cosang), max_turn);
    }
}

TEST(SmoothTurn, NonPositiveDtIsAContractViolation)
{
    Rng rng(1);
    EXPECT_THROW(st_step({0, 0, 0}, StState{}, 0.0, rng, MobilityParams{}), ContractViolation);
}

TEST(SmoothTurn, LongRunOctantOccupancyIsUniform)
{
    const Box box{{0, 0, 0}, {1000, 1000, 100}};
    WorldConfig cfg;
    cfg.bounds = box;
    World w(cfg, 99);
    Rng placement(99, Stream::Placement);
    for (const auto& p : place_nodes_ppp(200, box, placement))
        w.add_node(p);
    std::array<std::size_t, 8> octants{};
    std::size_t samples = 0;
    for (int step = 1; step <= 20000; ++step)
    {
        w.advance_positions(0.1);
        if (step % 10 != 0)
            continue;
        for (const auto& n : w.nodes())
        {
            const int ix = n.position.x >= 500.0, iy = n.position.y >= 500.0, iz = n.position.z >= 50.0;
            ++octants[ix + 2 * iy + 4 * iz];
            ++samples;
        }
    }
    const double expected = static_cast<double>(samples) / 8.0;
    for (auto c : octants)
        EXPECT_NEAR(static_cast<double>(c), expected, 0.10 * expected);
}
