#include "support.hpp"

#include <gtest/gtest.h>

using namespace aspuavn;

namespace
{

TraceRecord rec(TraceEvent e, std::uint32_t node, std::uint32_t peer, std::int64_t value = 0)
{
    TraceRecord r;
    r.event = e;
    r.node = node;
    r.peer = peer;
    r.value = value;
    return r;
}

std::vector<UavId> population(std::uint32_t n)
{
    std::vector<UavId> v;
    for (std::uint32_t i = 0; i < n; ++i)
        v.push_back(UavId{i});
    return v;
}

} // namespace

TEST(DeliveryRatio, SingleExperimentExample)
{
    ExperimentStats s;
    s.add(100, 87);
    EXPECT_DOUBLE_EQ(pdr(s), 87.0);
    EXPECT_DOUBLE_EQ(plr(s), 13.0);
}

TEST(DeliveryRatio, PrefactorDividesByExperimentCount)
{
    ExperimentStats s;
    for (int i = 0; i < 4; ++i)
        s.add(50, 50);
    EXPECT_DOUBLE_EQ(pdr(s), 25.0);
    EXPECT_DOUBLE_EQ(pooled_pdr(s), 100.0);
    EXPECT_DOUBLE_EQ(pooled_plr(s), 0.0);
}

TEST(DeliveryRatio, SumsToHundredOverN)
{
    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial)
    {
        ExperimentStats s;
        const auto n = 1 + rng.below(10);
        for (std::uint64_t i = 0; i < n; ++i)
        {
            const auto y = 1 + rng.below(200);
            s.add(y, rng.below(y + 1));
        }
        ASSERT_NEAR(pdr(s) + plr(s), 100.0 / static_cast<double>(n), 1e-9);
        ASSERT_GE(pdr(s), 0.0);
        ASSERT_LE(pdr(s), 100.0);
    }
}

TEST(DeliveryRatio, ScalingAllCountsLeavesRatiosUnchanged)
{
    ExperimentStats a, b;
    a.add(40, 30);
    a.add(60, 10);
    b.add(400, 300);
    b.add(600, 100);
    EXPECT_DOUBLE_EQ(pdr(a), pdr(b));
    EXPECT_DOUBLE_EQ(plr(a), plr(b));
}

TEST(DeliveryRatio, NoTrafficIsAContractViolation)
{
    ExperimentStats s;
    EXPECT_THROW(pdr(s), ContractViolation);
    s.add(0, 0);
    EXPECT_THROW(plr(s), ContractViolation);
}

TEST(DeliveryRatio, ReceivingMoreThanSentIsAContractViolation)
{
    ExperimentStats s;
    EXPECT_THROW(s.add(5, 6), ContractViolation);
}

TEST(Rates, WorkedExample)
{
    const auto r = rates(ConfusionMatrix{9, 90, 1, 1});
    ASSERT_TRUE(r.fpr && r.fnr && r.dr);
    EXPECT_NEAR(*r.fpr, 100.0 / 91.0, 1e-12);
    EXPECT_DOUBLE_EQ(*r.fnr, 10.0);
    EXPECT_DOUBLE_EQ(*r.dr, 90.0);
}

TEST(Rates, PerfectClassifier)
{
    const auto r = rates(ConfusionMatrix{5, 95, 0, 0});
    EXPECT_DOUBLE_EQ(*r.fpr, 0.0);
    EXPECT_DOUBLE_EQ(*r.fnr, 0.0);
    EXPECT_DOUBLE_EQ(*r.dr, 100.0);
}

TEST(Rates, ClassifierThatFlagsNothing)
{
    const auto r = rates(ConfusionMatrix{0, 95, 0, 5});
    EXPECT_DOUBLE_EQ(*r.fpr, 0.0);
    EXPECT_DOUBLE_EQ(*r.fnr, 100.0);
    EXPECT_DOUBLE_EQ(*r.dr, 0.0);
}

TEST(Rates, EmptyMatrixIsUndefinedEverywhere)
{
    const auto r = rates(ConfusionMatrix{});
    EXPECT_FALSE(r.fpr.has_value());
    EXPECT_FALSE(r.fnr.has_value());
    EXPECT_FALSE(r.dr.has_value());
}

TEST(Rates, NoAttackersLeavesDetectionUndefined)
{
    const auto r = rates(ConfusionMatrix{0, 48, 2, 0});
    EXPECT_DOUBLE_EQ(*r.fpr, 4.0);
    EXPECT_FALSE(r.dr.has_value());
    RunResult row;
    row.rates = r;
    EXPECT_NE(csv_row(row).find(",NA,"), std::string::npos) << csv_row(row);
}

TEST(Rates, DetectionAndMissRatesAreComplementary)
{
    Rng rng(8);
    for (int i = 0; i < 200; ++i)
    {
        ConfusionMatrix cm{rng.below(50), rng.below(50), rng.below(50), 1 + rng.below(50)};
        const auto r = rates(cm);
        ASSERT_NEAR(*r.dr + *r.fnr, 100.0, 1e-9);
    }
}

TEST(ScoreRun, HandBuiltTrace)
{
    // Sessions: 1 sends 4, receives 3; 2 sends 2, receives 0.
    // Attackers {3, 7}; isolated {3, 5}.
    std::vector<TraceRecord> t;
    t.push_back(rec(TraceEvent::RunHeader, kNoNode, kNoNode));
    for (int i = 0; i < 4; ++i)
        t.push_back(rec(TraceEvent::DataSent, 0, 9, 1));
    for (int i = 0; i < 3; ++i)
        t.push_back(rec(TraceEvent::DataReceived, 9, 0, 1));
    for (int i = 0; i < 2; ++i)
        t.push_back(rec(TraceEvent::DataSent, 1, 8, 2));
    t.push_back(rec(TraceEvent::Isolated, 0, 3));
    t.push_back(rec(TraceEvent::Isolated, 1, 5));
    t.push_back(rec(TraceEvent::Isolated, 2, 3));
    t.push_back(rec(TraceEvent::RunEnd, kNoNode, kNoNode));

    const auto s = score_run(t, population(10), {UavId{3}, UavId{7}});
    EXPECT_EQ(s.stats.n(), 2u);
    EXPECT_EQ(s.stats.total_sent(), 6u);
    EXPECT_EQ(s.stats.total_received(), 3u);
    EXPECT_DOUBLE_EQ(pdr(s.stats), 25.0);
    EXPECT_EQ(s.cm.tp, 1u);
    EXPECT_EQ(s.cm.fn, 1u);
    EXPECT_EQ(s.cm.fp, 1u);
    EXPECT_EQ(s.cm.tn, 7u);
    EXPECT_EQ(s.cm.all(), 10u);
}

TEST(ScoreRun, TruncatedTraceIsAnError)
{
    std::vector<TraceRecord> t{rec(TraceEvent::RunHeader, kNoNode, kNoNode), rec(TraceEvent::DataSent, 0, 1, 1)};
    EXPECT_THROW(score_run(t, population(2), {}), Error);
    EXPECT_THROW(score_run({}, population(2), {}), Error);
}

TEST(ScoreRun, MatchesSimulatorCountersOnARealRun)
{
    ScenarioConfig c = desk_scenario();
    c.sim_time = 60.0;
    RunArtifacts art;
    const auto res = run_scenario(c, {4, 100, true}, {}, &art);
    std::vector<UavId> pop;
    for (std::uint32_t i = 0; i < c.node_count; ++i)
        pop.push_back(UavId{i});
    const auto s = score_run(art.records, pop, art.attackers);
    EXPECT_EQ(s.cm.all(), c.node_count);
    EXPECT_EQ(s.cm.tp + s.cm.fn, art.attackers.size());
    EXPECT_DOUBLE_EQ(pooled_pdr(s.stats), res.pooled_pdr);
    EXPECT_EQ(s.cm.tp, res.cm.tp);
    EXPECT_EQ(s.cm.fp, res.cm.fp);
}
