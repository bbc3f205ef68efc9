#include <gtest/gtest.h>

#include <random>

#include "mzp/core_model.hpp"

using namespace mzp;

namespace {

DistanceMatrix random_distances(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) v[static_cast<std::size_t>(i * n + j)] = u(rng);
    return DistanceMatrix(n, std::move(v));
}

DemandMatrix random_demand(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> u(0, 9);
    std::vector<DemandEntry> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.push_back({i, j, static_cast<double>(u(rng) < 4 ? 0 : u(rng))});
    return DemandMatrix::from_triples(n, t);
}

std::vector<CellId> random_subset(std::mt19937_64& rng, int n, int k) {
    std::vector<CellId> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(k));
    return all;
}

}  // namespace

TEST(ZoneDiameter, SingletonIsZero) {
    DistanceMatrix d(2, {0, 0.3, 0.5, 0});
    const CellId cells[] = {1};
    EXPECT_EQ(zone_diameter_sq(cells, d), 0.0);
}

TEST(ZoneDiameter, TwoWayMaxSquared) {
    DistanceMatrix d(2, {0, 0.3, 0.5, 0});
    const CellId cells[] = {0, 1};
    EXPECT_DOUBLE_EQ(zone_diameter_sq(cells, d), 0.25);
}

TEST(ZoneDiameter, InvalidCellIsInputError) {
    DistanceMatrix d(2, {0, 0.3, 0.5, 0});
    const CellId cells[] = {0, 2};
    EXPECT_THROW(zone_diameter_sq(cells, d), InputError);
}

TEST(ZoneDiameter, MatchesExhaustivePairScan) {
    std::mt19937_64 rng(11);
    const auto dist = random_distances(rng, 9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cells = random_subset(rng, 9, 4);
        double brute = 0.0;
        for (CellId a : cells)
            for (CellId b : cells) brute = std::max(brute, dist(a, b) * dist(a, b));
        EXPECT_EQ(zone_diameter_sq(cells, dist), brute);
    }
}

TEST(ZoneCost, Arithmetic) {
    CostParams p;  // alpha 5, beta 1, B 8, B0 2
    EXPECT_DOUBLE_EQ(zone_cost(0.0, p), 1.0);
    EXPECT_DOUBLE_EQ(zone_cost(0.2, p), 2.0);
    EXPECT_DOUBLE_EQ(zone_cost(0.2, p), p.zone_budget);
    EXPECT_EQ(p.alpha, 5.0);
    EXPECT_EQ(p.beta, 1.0);
    EXPECT_EQ(p.budget, 8.0);
    EXPECT_EQ(p.zone_budget, 2.0);
    EXPECT_FALSE(p.include_self_pairs);
}

TEST(ZoneCost, ParamValidation) {
    CostParams p;
    p.beta = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.zone_budget = 0.5;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.alpha = -1;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(IntraZoneDemand, Examples) {
    auto d = DemandMatrix::from_triples(3, {{0, 1, 4}, {1, 0, 7}, {1, 1, 2}, {2, 0, 1}});
    const CellId single[] = {1};
    EXPECT_EQ(intra_zone_demand(single, d, false), 0.0);
    EXPECT_EQ(intra_zone_demand(single, d, true), 2.0);
    const CellId pair[] = {0, 1};
    EXPECT_EQ(intra_zone_demand(pair, d, false), 11.0);
    EXPECT_EQ(intra_zone_demand(pair, d, true), 13.0);
}

TEST(IntraZoneDemand, MatchesPairSumOracle) {
    std::mt19937_64 rng(5);
    const auto demand = random_demand(rng, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cells = random_subset(rng, 10, 6);
        double brute = 0.0;
        for (CellId a : cells)
            for (CellId b : cells)
                if (a != b) brute += demand.at(a, b);
        EXPECT_EQ(intra_zone_demand(cells, demand, false), brute);
    }
}

TEST(DemandMatrix, RejectsNegativeAndOutOfRange) {
    EXPECT_THROW(DemandMatrix::from_triples(2, {{0, 1, -1}}), ValidationError);
    EXPECT_THROW(DemandMatrix::from_triples(2, {{0, 2, 1}}), ValidationError);
    const auto d = DemandMatrix::from_triples(2, {{0, 1, 1}, {0, 1, 2}, {1, 0, 0}});
    ASSERT_EQ(d.entries().size(), 1u);
    EXPECT_EQ(d.at(0, 1), 3.0);
    EXPECT_EQ(d.at(1, 0), 0.0);
}

TEST(DistanceMatrix, ValidatesDiagonalAndSign) {
    EXPECT_THROW(DistanceMatrix(2, {0.1, 0, 0, 0}), ValidationError);
    EXPECT_THROW(DistanceMatrix(2, {0, -1, 0, 0}), ValidationError);
    EXPECT_THROW(DistanceMatrix(2, {0, 1, 0}), ValidationError);
}

TEST(ReducedCost, ZeroDuals) {
    DistanceMatrix d(2, {0, 0.3, 0.5, 0});
    const auto z = Zone::make({0, 1}, d, CostParams{});
    EXPECT_EQ(reduced_cost(z, Duals{}), 0.0);
}

TEST(ReducedCost, DirectSubstitution) {
    // D^2 = 0.2 exactly: two-way distance sqrt(0.2)
    const double c = std::sqrt(0.2);
    DistanceMatrix d(2, {0, c, c * 0.5, 0});
    const auto z = Zone::make({1, 0}, d, CostParams{});
    Duals duals;
    duals.lambda = 1.0;
    duals.pi = {{0, 1, 0.6}, {1, 0, 0.6}};
    EXPECT_NEAR(z.cost(), 2.0, 1e-15);
    EXPECT_NEAR(reduced_cost(z, duals), -0.8, 1e-12);
}

TEST(Zone, SortsAndDeduplicates) {
    std::mt19937_64 rng(3);
    const auto dist = random_distances(rng, 6);
    const auto z = Zone::make({4, 1, 4, 2}, dist, CostParams{});
    EXPECT_EQ(std::vector<CellId>(z.cells().begin(), z.cells().end()), (std::vector<CellId>{1, 2, 4}));
    EXPECT_THROW(Zone::make({}, dist, CostParams{}), InputError);
}

// Properties over randomized zones.
TEST(CoreProperties, RandomizedInvariants) {
    std::mt19937_64 rng(2024);
    const int n = 10;
    const auto dist = random_distances(rng, n);
    const auto demand = random_demand(rng, n);
    CostParams params;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 1 + static_cast<int>(rng() % (n - 1));
        auto cells = random_subset(rng, n, k);
        const auto z = Zone::make(cells, dist, params);
        // caches reproduce bit-identically
        EXPECT_EQ(z.diameter_sq(), zone_diameter_sq(z.cells(), dist));
        EXPECT_EQ(z.cost(), params.alpha * z.diameter_sq() + params.beta);
        // adding a cell never shrinks the diameter or the demand
        CellId extra = static_cast<CellId>(rng() % n);
        auto bigger = cells;
        bigger.push_back(extra);
        const auto zb = Zone::make(bigger, dist, params);
        EXPECT_GE(zb.diameter_sq(), z.diameter_sq());
        EXPECT_GE(intra_zone_demand(zb.cells(), demand, false),
                  intra_zone_demand(z.cells(), demand, false));
        // monotone cost
        EXPECT_LE(zone_cost(z.diameter_sq(), params), zone_cost(zb.diameter_sq(), params));
        CostParams steeper = params;
        steeper.alpha += u(rng);
        EXPECT_LE(zone_cost(z.diameter_sq(), params), zone_cost(z.diameter_sq(), steeper));
        // reduced cost: lambda = 0 gives the raw pi sum; strictly decreasing in lambda
        Duals duals;
        for (const auto& e : demand.entries())
            if (e.from != e.to) duals.pi.push_back({e.from, e.to, u(rng)});
        double inside = 0.0;
        for (const auto& p : duals.pi)
            if (z.contains(p.from) && z.contains(p.to)) inside += p.value;
        EXPECT_DOUBLE_EQ(reduced_cost(z, duals), inside);
        duals.lambda = u(rng);
        const double r1 = reduced_cost(z, duals);
        duals.lambda += 0.1;
        EXPECT_LT(reduced_cost(z, duals), r1);
    }
}

TEST(CoveredDemand, CountsOverlapOnce) {
    const auto demand = DemandMatrix::from_triples(4, {{0, 1, 1}, {1, 2, 2}, {2, 1, 3}, {0, 3, 5}});
    DistanceMatrix d(4, std::vector<double>(16, 0.0));
    std::vector<Zone> zones{Zone::make({0, 1, 2}, d, CostParams{}), Zone::make({1, 2}, d, CostParams{})};
    EXPECT_EQ(covered_demand(zones, demand, false), 6.0);
    EXPECT_EQ(countable_demand(demand, false), 11.0);
}
