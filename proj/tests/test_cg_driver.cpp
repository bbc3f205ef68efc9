#include <gtest/gtest.h>

#include "mzp/cg_driver.hpp"
#include "mzp/oracle.hpp"
#include "support/fixtures.hpp"

using namespace mzp;
using mzp::testing::grid_instance;
using mzp::testing::make_instance;
using mzp::testing::random_instance;

namespace {

CostParams roomy() {
    CostParams p;
    p.budget = 5.0;
    p.zone_budget = 3.0;
    return p;
}

std::vector<CellId> cells_vec(const Zone& z) { return {z.cells().begin(), z.cells().end()}; }

}  // namespace

TEST(PricingModeNames, RoundTrip) {
    for (auto m : {PricingMode::exact, PricingMode::heuristic, PricingMode::hybrid})
        EXPECT_EQ(parse_pricing_mode(to_string(m)), m);
    EXPECT_THROW(parse_pricing_mode("greedy"), InputError);
}

TEST(CgConfig, RejectsBadValues) {
    CgConfig c;
    c.runs = 0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.total_time_limit = -1.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.pricing_time_limit = 0.0;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(InitializePool, ZoneBudgetBelowBetaIsInfeasible) {
    Rng rng(1);
    auto inst = random_instance(rng, 5, 0.5, roomy());
    inst.params.zone_budget = 0.5;
    EXPECT_THROW(initialize_pool(inst, {}), InfeasibleError);
}

TEST(InitializePool, NoAffordablePairIsInfeasible) {
    auto p = roomy();
    p.zone_budget = 1.0;
    Rng rng(2);
    const auto inst = random_instance(rng, 5, 0.5, p);
    EXPECT_THROW(initialize_pool(inst, {}), InfeasibleError);
}

TEST(InitializePool, ConcentratedDemandSeedsThatPair) {
    std::vector<double> d(16, 0.5);
    for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(i * 4 + i)] = 0.0;
    d[1 * 4 + 3] = d[3 * 4 + 1] = 0.1;
    const auto inst = make_instance(4, d, {{1, 3, 50.0}}, roomy());
    const auto pool = initialize_pool(inst, {});
    bool found = false;
    for (const auto& z : pool.zones()) found = found || (z.contains(1) && z.contains(3));
    EXPECT_TRUE(found);
}

TEST(InitializePool, ZonesRespectSingleZoneBudget) {
    const auto inst = grid_instance(4, 4, 5);
    CgConfig c;
    c.seed = 3;
    const auto pool = initialize_pool(inst, c);
    EXPECT_FALSE(pool.empty());
    for (std::size_t k = 0; k < pool.size(); ++k) {
        EXPECT_LE(pool.zone(k).cost(), inst.params.zone_budget + 1e-9);
        EXPECT_EQ(pool.source(k), ZoneSource::initial);
    }
}

TEST(InitializePool, FallsBackToAffordablePairWithoutDemand) {
    Rng rng(3);
    auto inst = random_instance(rng, 5, 0.0, roomy());
    const auto pool = initialize_pool(inst, {});
    ASSERT_EQ(pool.size(), 1u);
    EXPECT_EQ(pool.zone(0).size(), 2u);
}

TEST(RunCg, AllDemandInOneZoneIsFullyCovered) {
    std::vector<double> d(16, 0.2);
    for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(i * 4 + i)] = 0.0;
    const auto inst = make_instance(4, d, {{0, 1, 2.0}, {2, 3, 3.0}, {3, 0, 1.0}}, roomy());
    for (auto mode : {PricingMode::exact, PricingMode::heuristic, PricingMode::hybrid}) {
        CgConfig c;
        c.pricing = mode;
        const auto r = run_cg(inst, c);
        EXPECT_DOUBLE_EQ(r.solution.coverage(), 1.0) << to_string(mode);
        EXPECT_EQ(r.trace.termination, "converged");
    }
}

TEST(RunCg, ZeroTimeLimitSolvesInitialPoolOnly) {
    const auto inst = grid_instance(4, 4, 7);
    CgConfig c;
    c.total_time_limit = 0.0;
    const auto r = run_cg(inst, c);
    EXPECT_TRUE(r.trace.iterations.empty());
    EXPECT_EQ(r.trace.termination, "timeout");
    EXPECT_EQ(r.pool.size(), r.trace.initial_pool_size);
    EXPECT_LE(r.solution.total_cost, inst.params.budget + 1e-9);
}

TEST(RunCg, IterationCapStopsLoop) {
    const auto inst = grid_instance(4, 4, 7);
    CgConfig c;
    c.max_iterations = 1;
    const auto r = run_cg(inst, c);
    EXPECT_LE(r.trace.iterations.size(), 1u);
    if (r.trace.iterations.size() == 1u && r.trace.iterations[0].columns_added > 0) {
        EXPECT_EQ(r.trace.termination, "iteration_cap");
    }
}

TEST(RunCg, ExactModeConvergesToFullMasterLp) {
    Rng rng(9);
    for (int rep = 0; rep < 6; ++rep) {
        const auto inst = random_instance(rng, 7, 0.5, roomy());
        CgConfig c;
        c.pricing = PricingMode::exact;
        c.seed = static_cast<std::uint64_t>(rep);
        const auto r = run_cg(inst, c);
        ASSERT_EQ(r.trace.termination, "converged");
        EXPECT_TRUE(r.trace.iterations.back().proven);
        EXPECT_LE(oracle_pricing(r.trace.final_duals, inst).reduced_cost, 1e-6);
        EXPECT_NEAR(r.trace.final_lp_objective, full_master_lp(inst), r.trace.epsilon_slack + 1e-5);
        EXPECT_LE(r.solution.covered_demand, oracle_optimum(inst).covered_demand + 1e-9);
    }
}

TEST(RunCg, TraceIsConsistent) {
    const auto inst = grid_instance(4, 4, 11);
    CgConfig c;
    c.pricing = PricingMode::hybrid;
    c.seed = 5;
    const auto r = run_cg(inst, c);
    std::size_t prev = r.trace.initial_pool_size;
    for (const auto& it : r.trace.iterations) {
        EXPECT_EQ(it.pool_size, prev + static_cast<std::size_t>(it.columns_added));
        prev = it.pool_size;
    }
    EXPECT_EQ(r.pool.size(), prev);
    EXPECT_EQ(r.trace.iterations.back().columns_added, 0);
    EXPECT_DOUBLE_EQ(r.solution.covered_demand, covered_demand(r.solution.zones, inst.demand, false));
    EXPECT_LE(r.solution.covered_demand, r.trace.final_lp_objective + 1e-6);
}

TEST(RunCg, DeterministicForFixedSeed) {
    const auto inst = grid_instance(4, 5, 13);
    CgConfig c;
    c.seed = 21;
    const auto a = run_cg(inst, c);
    const auto b = run_cg(inst, c);
    ASSERT_EQ(a.trace.iterations.size(), b.trace.iterations.size());
    for (std::size_t k = 0; k < a.trace.iterations.size(); ++k) {
        EXPECT_EQ(a.trace.iterations[k].lp_objective, b.trace.iterations[k].lp_objective);
        EXPECT_EQ(a.trace.iterations[k].pool_size, b.trace.iterations[k].pool_size);
    }
    ASSERT_EQ(a.solution.zones.size(), b.solution.zones.size());
    for (std::size_t k = 0; k < a.solution.zones.size(); ++k)
        EXPECT_EQ(cells_vec(a.solution.zones[k]), cells_vec(b.solution.zones[k]));
}

TEST(RunCg, PoolZonesAreAffordableAndUnique) {
    const auto inst = grid_instance(5, 4, 17);
    const auto r = run_cg(inst, {});
    std::set<std::vector<CellId>> keys;
    for (const auto& z : r.pool.zones()) {
        EXPECT_TRUE(inst.params.zone_affordable(z.diameter_sq()));
        EXPECT_TRUE(keys.insert(cells_vec(z)).second);
    }
}
