#include <gtest/gtest.h>

#include <filesystem>

#include "mzp/network_distances.hpp"

using namespace mzp;

namespace {

const LatLon kBase{40.0, -74.0};

RoadNetwork grid_network(int side, double spacing_m, Rng& rng) {
    RoadNetwork net;
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            net.nodes.push_back({100 + r * side + c, geo::offset_m(kBase, c * spacing_m, r * spacing_m)});
    auto link = [&](int a, int b) {
        net.edges.push_back({a, b, 20.0 + 40.0 * uniform_unit(rng)});
        net.edges.push_back({b, a, 20.0 + 40.0 * uniform_unit(rng)});
    };
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int k = r * side + c;
            if (c + 1 < side) link(k, k + 1);
            if (r + 1 < side) link(k, k + side);
        }
    return net;
}

std::vector<double> bellman_ford(const RoadNetwork& net, int source) {
    std::vector<double> d(net.nodes.size(), kInf);
    d[static_cast<std::size_t>(source)] = 0.0;
    for (std::size_t round = 0; round + 1 < net.nodes.size(); ++round)
        for (const auto& e : net.edges) {
            const double via = d[static_cast<std::size_t>(e.from)] + e.weight;
            if (via < d[static_cast<std::size_t>(e.to)]) d[static_cast<std::size_t>(e.to)] = via;
        }
    return d;
}

}  // namespace

TEST(MapCellsToNodes, CoincidentAndTies) {
    RoadNetwork net;
    net.nodes = {{7, geo::offset_m(kBase, 100, 0)}, {3, geo::offset_m(kBase, -100, 0)}, {9, kBase}};
    std::vector<Cell> cells{{0, kBase, -1, {}}, {1, geo::offset_m(kBase, 0, 500), -1, {}}};
    net.nodes.pop_back();
    const auto ids = map_cells_to_nodes(cells, net);
    EXPECT_EQ(ids[0], 3);  // equidistant: lower id wins
    net.nodes.push_back({9, kBase});
    EXPECT_EQ(map_cells_to_nodes(cells, net)[0], 9);
    EXPECT_THROW(map_cells_to_nodes(cells, RoadNetwork{}), InputError);
}

TEST(MapCellsToNodes, MatchesLinearScan) {
    Rng rng(4);
    const auto net = grid_network(6, 400, rng);
    std::vector<Cell> cells;
    for (int k = 0; k < 10; ++k)
        cells.push_back({k, geo::offset_m(kBase, uniform_real(rng, 0, 2000), uniform_real(rng, 0, 2000)), -1, {}});
    const auto ids = map_cells_to_nodes(cells, net);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        double best = kInf;
        long id = -1;
        for (const auto& n : net.nodes) {
            const double d = geo::great_circle_m(cells[k].centroid, n.position);
            if (d < best || (d == best && n.id < id)) {
                best = d;
                id = n.id;
            }
        }
        EXPECT_EQ(ids[k], id);
    }
}

TEST(ShortestPathMatrix, SingleEdgeUnreachableBackIsError) {
    RoadNetwork net;
    net.nodes = {{1, kBase}, {2, geo::offset_m(kBase, 100, 0)}};
    net.edges = {{0, 1, 7.0}};
    EXPECT_THROW(shortest_path_matrix(net, {1, 2}), InfeasibleError);
    net.edges.push_back({1, 0, 9.0});
    const auto m = shortest_path_matrix(net, {1, 2});
    EXPECT_EQ(m, (std::vector<double>{0, 7, 9, 0}));
}

TEST(ShortestPathMatrix, AsymmetricTriangleMatchesBellmanFord) {
    RoadNetwork net;
    net.nodes = {{1, kBase}, {2, kBase}, {3, kBase}};
    net.edges = {{0, 1, 2.0}, {1, 2, 3.0}, {2, 0, 4.0}, {0, 2, 10.0}};
    const auto m = shortest_path_matrix(net, {1, 2, 3});
    for (int s = 0; s < 3; ++s) {
        const auto ref = bellman_ford(net, s);
        for (int t = 0; t < 3; ++t) EXPECT_EQ(m[static_cast<std::size_t>(s * 3 + t)], ref[static_cast<std::size_t>(t)]);
    }
    EXPECT_EQ(m[2], 5.0);
}

TEST(ShortestPathMatrix, GridMatchesBellmanFordAndTriangleInequality) {
    Rng rng(8);
    const auto net = grid_network(5, 300, rng);
    std::vector<long> sources;
    for (int k = 0; k < 25; k += 2) sources.push_back(net.nodes[static_cast<std::size_t>(k)].id);
    const auto m = shortest_path_matrix(net, sources, 3);
    const std::size_t n = sources.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto ref = bellman_ford(net, static_cast<int>(2 * i));
        EXPECT_EQ(m[i * n + i], 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(m[i * n + j], ref[2 * j], 1e-9);
            for (std::size_t k = 0; k < n; ++k) EXPECT_LE(m[i * n + k], m[i * n + j] + m[j * n + k] + 1e-9);
        }
    }
    EXPECT_EQ(shortest_path_matrix(net, sources, 1), m);
}

TEST(Normalize, ScalesByMaxAndRoundTrips) {
    const std::vector<double> raw{0, 400, 100, 0};
    const auto d = normalize(2, raw);
    EXPECT_EQ(d.normalization_factor(), 400.0);
    EXPECT_EQ(d(0, 1), 1.0);
    EXPECT_EQ(d(1, 0), 0.25);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            EXPECT_NEAR(d(i, j) * d.normalization_factor(), raw[static_cast<std::size_t>(i * 2 + j)], 1e-12 * 400);
    const auto z = normalize(2, std::vector<double>(4, 0.0));
    EXPECT_EQ(z.normalization_factor(), 1.0);
    EXPECT_EQ(z(0, 1), 0.0);
}

TEST(DistanceCache, ReusesStoredMatrix) {
    Rng rng(2);
    const auto net = grid_network(3, 300, rng);
    const std::vector<long> sources{100, 104, 108};
    const auto dir = (std::filesystem::temp_directory_path() / "mzp_cache_test").string();
    std::filesystem::remove_all(dir);
    const auto first = cached_shortest_path_matrix(net, sources, dir);
    EXPECT_FALSE(std::filesystem::is_empty(dir));
    EXPECT_EQ(cached_shortest_path_matrix(net, sources, dir), first);
    EXPECT_EQ(first, shortest_path_matrix(net, sources));
    std::filesystem::remove_all(dir);
}
