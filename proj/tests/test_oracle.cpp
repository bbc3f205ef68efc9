#include <gtest/gtest.h>

#include "mzp/oracle.hpp"
#include "support/fixtures.hpp"

using namespace mzp;
using mzp::testing::make_instance;
using mzp::testing::random_duals;
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

TEST(OraclePricing, ZeroDualsPickSmallestSingleton) {
    Rng rng(1);
    const auto inst = random_instance(rng, 4, 0.5, roomy());
    const auto r = oracle_pricing(Duals{}, inst);
    ASSERT_TRUE(r.zone);
    EXPECT_EQ(r.reduced_cost, 0.0);
    EXPECT_EQ(cells_vec(*r.zone), (std::vector<CellId>{0}));
}

TEST(OraclePricing, SinglePositivePairWins) {
    std::vector<double> d(9, 0.2);
    for (int i = 0; i < 3; ++i) d[static_cast<std::size_t>(i * 3 + i)] = 0.0;
    d[0 * 3 + 1] = d[1 * 3 + 0] = d[1 * 3 + 2] = d[2 * 3 + 1] = 0.5;
    const auto inst = make_instance(3, d, {{0, 2, 1.0}}, roomy());
    Duals duals;
    duals.lambda = 0.1;
    duals.pi = {{0, 2, 3.0}};
    const auto r = oracle_pricing(duals, inst);
    ASSERT_TRUE(r.zone);
    EXPECT_EQ(cells_vec(*r.zone), (std::vector<CellId>{0, 2}));
    EXPECT_NEAR(r.reduced_cost, 3.0 - 0.1 * (5.0 * 0.04 + 1.0), 1e-12);
}

TEST(OraclePricing, TiesGoToLexicographicallySmallest) {
    std::vector<double> d(9, 0.0);
    const auto inst = make_instance(3, d, {{0, 1, 1.0}}, roomy());
    Duals duals;
    duals.pi = {{0, 1, 1.0}};
    const auto r = oracle_pricing(duals, inst);
    EXPECT_EQ(cells_vec(*r.zone), (std::vector<CellId>{0, 1}));
}

TEST(OraclePricing, RespectsZoneSizeCap) {
    Rng rng(2);
    auto p = roomy();
    p.enforce_zone_budget = false;
    const auto inst = random_instance(rng, 6, 0.5, p);
    Duals duals;
    duals.pi = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
    OracleLimits lim;
    lim.max_zone_size = 2;
    const auto r = oracle_pricing(duals, inst, lim);
    EXPECT_EQ(r.zone->size(), 2u);
    EXPECT_NEAR(r.reduced_cost, 1.0, 1e-12);
}

TEST(OracleGuards, RefuseLargeInstances) {
    Rng rng(3);
    const auto big = random_instance(rng, 16, 0.2, roomy());
    EXPECT_THROW(oracle_pricing(Duals{}, big), GuardError);
    EXPECT_THROW(enumerate_candidates(big), GuardError);
    const auto nine = random_instance(rng, 9, 0.2, roomy());
    EXPECT_THROW(oracle_optimum(nine), GuardError);
    const auto seven = random_instance(rng, 7, 0.2, roomy());
    EXPECT_THROW(recursive_optimum(seven), GuardError);
}

TEST(EnumerateCandidates, SingletonsOnlyWhenZoneBudgetEqualsBeta) {
    Rng rng(4);
    auto p = roomy();
    p.zone_budget = p.beta;
    const auto inst = random_instance(rng, 6, 0.5, p);
    const auto pool = enumerate_candidates(inst);
    EXPECT_EQ(pool.size(), 6u);
    for (const auto& z : pool.zones()) EXPECT_EQ(z.size(), 1u);
}

TEST(EnumerateCandidates, MatchesIndependentSubsetCount) {
    Rng rng(5);
    const auto inst = random_instance(rng, 7, 0.5, roomy());
    const auto pool = enumerate_candidates(inst);
    std::size_t count = 0;
    for (unsigned mask = 1; mask < (1u << 7); ++mask) {
        double worst = 0.0;
        for (int a = 6; a >= 0; --a)
            for (int b = 6; b >= 0; --b)
                if ((mask >> a & 1u) && (mask >> b & 1u)) worst = std::max(worst, inst.distances(a, b));
        if (5.0 * worst * worst + 1.0 <= 3.0 + 1e-9) ++count;
    }
    EXPECT_EQ(pool.size(), count);
}

TEST(OracleOptimum, SingleAffordablePair) {
    std::vector<double> d{0.0, 0.3, 0.3, 0.0};
    const auto inst = make_instance(2, d, {{0, 1, 4.0}, {1, 0, 1.0}}, roomy());
    const auto s = oracle_optimum(inst);
    ASSERT_EQ(s.zones.size(), 1u);
    EXPECT_EQ(cells_vec(s.zones[0]), (std::vector<CellId>{0, 1}));
    EXPECT_DOUBLE_EQ(s.covered_demand, 5.0);
    EXPECT_DOUBLE_EQ(s.coverage(), 1.0);
}

TEST(OracleOptimum, MipAndRecursiveSearchAgree) {
    Rng rng(6);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 3 + static_cast<int>(uniform_index(rng, 4));
        const auto inst = random_instance(rng, n, 0.5, roomy());
        const auto a = oracle_optimum(inst);
        const auto b = recursive_optimum(inst);
        EXPECT_DOUBLE_EQ(a.covered_demand, b.covered_demand) << "rep " << rep;
        EXPECT_LE(a.total_cost, inst.params.budget + 1e-9);
        EXPECT_LE(b.total_cost, inst.params.budget + 1e-9);
    }
}

TEST(OracleOptimum, LpBoundsInteger) {
    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = random_instance(rng, 7, 0.5, roomy());
        EXPECT_GE(full_master_lp(inst) + 1e-7, oracle_optimum(inst).covered_demand);
    }
}

TEST(OraclePricing, AgreesWithBruteForceOverPool) {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const auto inst = random_instance(rng, 6, 0.5, roomy());
        const auto duals = random_duals(rng, inst);
        const auto pool = enumerate_candidates(inst);
        double best = -kInf;
        for (const auto& z : pool.zones()) best = std::max(best, reduced_cost(z, duals));
        EXPECT_NEAR(oracle_pricing(duals, inst).reduced_cost, best, 1e-12);
    }
}
