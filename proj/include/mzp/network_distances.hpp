#pragma once
/// Cell-to-cell shortest-path travel times over the road network.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <queue>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mzp/ingest.hpp"

namespace mzp {

/// Node id (as in nodes.csv) nearest each cell centroid; ties go to the lowest id.
inline std::vector<long> map_cells_to_nodes(const std::vector<Cell>& cells, const RoadNetwork& network) {
    if (network.nodes.empty()) throw InputError("map_cells_to_nodes: road network has no nodes");
    std::vector<long> out;
    out.reserve(cells.size());
    for (const auto& c : cells) {
        long best = 0;
        double best_d = kInf;
        for (const auto& node : network.nodes) {
            const double d = geo::great_circle_m(c.centroid, node.position);
            if (d < best_d || (d == best_d && node.id < best)) {
                best_d = d;
                best = node.id;
            }
        }
        out.push_back(best);
    }
    return out;
}

/// Single-source Dijkstra over node indices; unreachable nodes stay at kInf.
inline std::vector<double> dijkstra(const RoadNetwork& network, int source) {
    const auto n = network.nodes.size();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : network.edges) adj[static_cast<std::size_t>(e.from)].push_back({e.to, e.weight});
    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(source)] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
            const double nd = d + w;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

/// Row-major |sources| x |sources| matrix of shortest-path times between the
/// given node ids. Any unreachable ordered pair is an InfeasibleError.
inline std::vector<double> shortest_path_matrix(const RoadNetwork& network, const std::vector<long>& sources,
                                                int threads = 0) {
    network.validate();
    std::unordered_map<long, int> index;
    for (std::size_t k = 0; k < network.nodes.size(); ++k) index.emplace(network.nodes[k].id, static_cast<int>(k));
    std::vector<int> src;
    for (long id : sources) {
        auto it = index.find(id);
        if (it == index.end()) throw InputError("shortest_path_matrix: unknown node " + std::to_string(id));
        src.push_back(it->second);
    }
    const std::size_t m = src.size();
    std::vector<double> out(m * m, 0.0);
    auto run_rows = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < m; i += step) {
            const auto d = dijkstra(network, src[i]);
            for (std::size_t j = 0; j < m; ++j) out[i * m + j] = i == j ? 0.0 : d[static_cast<std::size_t>(src[j])];
        }
    };
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(m, 1));
    if (workers <= 1) {
        run_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_rows, w, workers);
        for (auto& t : pool) t.join();
    }

    std::string missing;
    int count = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (out[i * m + j] == kInf) {
                if (++count <= 20) missing += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
            }
    if (count > 0)
        throw InfeasibleError("road network is disconnected for " + std::to_string(count) +
                              " cell pair(s):" + missing + (count > 20 ? " ..." : ""));
    return out;
}

/// Divide by the largest entry; an all-zero matrix is returned unchanged with factor 1.
inline DistanceMatrix normalize(int n, const std::vector<double>& raw) {
    double mx = 0.0;
    for (double v : raw) mx = std::max(mx, v);
    if (mx == 0.0) return DistanceMatrix(n, raw, 1.0);
    std::vector<double> scaled(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) scaled[k] = raw[k] / mx;
    return DistanceMatrix(n, std::move(scaled), mx);
}

inline std::string network_digest(const RoadNetwork& network, const std::vector<long>& sources) {
    std::uint64_t h = fnv1a("mzp-distances-v1");
    auto mix = [&](const void* p, std::size_t len) {
        h = fnv1a(std::string_view(static_cast<const char*>(p), len), h);
    };
    for (const auto& node : network.nodes) mix(&node.id, sizeof node.id);
    for (const auto& e : network.edges) {
        mix(&e.from, sizeof e.from);
        mix(&e.to, sizeof e.to);
        mix(&e.weight, sizeof e.weight);
    }
    for (long s : sources) mix(&s, sizeof s);
    return hex_digest(h);
}

/// shortest_path_matrix with an optional on-disk cache keyed by network and sources.
inline std::vector<double> cached_shortest_path_matrix(const RoadNetwork& network, const std::vector<long>& sources,
                                                       const std::string& cache_dir) {
    if (cache_dir.empty()) return shortest_path_matrix(network, sources);
    const std::string key = network_digest(network, sources);
    const auto path = std::filesystem::path(cache_dir) / ("distances-" + key + ".json");
    if (std::filesystem::exists(path)) {
        try {
            const json doc = read_json_file(path.string());
            auto values = doc.at("values").get<std::vector<double>>();
            if (doc.at("key") == key && values.size() == sources.size() * sources.size()) return values;
        } catch (const std::exception&) {
        }
    }
    auto values = shortest_path_matrix(network, sources);
    std::filesystem::create_directories(cache_dir);
    std::ofstream out(path);
    if (out) out << json{{"key", key}, {"values", values}}.dump() << "\n";
    return values;
}

}  // namespace mzp
