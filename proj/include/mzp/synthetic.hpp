#pragma once
/// Deterministic synthetic instances: a square or hex-offset grid of cells,
/// a jittered grid road network, and hotspot gravity demand.

#include <cmath>
#include <string>
#include <vector>

#include "mzp/network_distances.hpp"

namespace mzp {

struct SyntheticSpec {
    int rows = 5;
    int cols = 5;
    bool hex = false;
    double spacing_m = 800.0;
    int hotspots = 2;
    double intensity = 4.0;      ///< peak extra attraction at a hotspot
    double decay_radius = 1.5;   ///< hotspot spread, in cell spacings
    double gravity_length = 2.5; ///< trip-length decay, in cell spacings
    double demand_scale = 6.0;
    double density = 0.35;       ///< share of OD pairs that carry demand
    double speed_mps = 10.0;
    double speed_jitter = 0.3;
    std::uint64_t seed = 1;
    LatLon origin{35.0456, -85.3097};
    CostParams params;

    void validate() const {
        if (rows < 2 || cols < 2) throw InputError("synthetic grid needs rows, cols >= 2");
        if (!(spacing_m > 0.0) || !(speed_mps > 0.0)) throw InputError("spacing and speed must be > 0");
        if (hotspots < 0) throw InputError("hotspots must be >= 0");
        if (!(speed_jitter >= 0.0 && speed_jitter < 1.0)) throw InputError("speed_jitter must be in [0, 1)");
        if (!(density > 0.0 && density <= 1.0)) throw InputError("density must be in (0, 1]");
        if (!(decay_radius > 0.0) || !(gravity_length > 0.0)) throw InputError("decay lengths must be > 0");
        params.validate();
    }

    int size() const { return rows * cols; }
};

inline json synthetic_spec_to_json(const SyntheticSpec& s) {
    return {{"rows", s.rows},           {"cols", s.cols},
            {"layout", s.hex ? "hex" : "square"},
            {"spacing_m", s.spacing_m}, {"hotspots", s.hotspots},
            {"intensity", s.intensity}, {"decay_radius", s.decay_radius},
            {"gravity_length", s.gravity_length},
            {"demand_scale", s.demand_scale},
            {"density", s.density},     {"speed_mps", s.speed_mps},
            {"speed_jitter", s.speed_jitter},
            {"seed", s.seed}};
}

struct SyntheticWorld {
    std::vector<Cell> cells;
    RoadNetwork network;
    DemandMatrix demand;
};

inline SyntheticWorld generate_world(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SyntheticWorld w;
    const int n = spec.size();
    std::vector<std::pair<double, double>> xy;  // grid units
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            const double x = c + (spec.hex && (r % 2 == 1) ? 0.5 : 0.0);
            const double y = spec.hex ? r * std::sqrt(3.0) / 2.0 : r;
            xy.push_back({x, y});
            Cell cell;
            cell.id = static_cast<CellId>(w.cells.size());
            cell.centroid = geo::offset_m(spec.origin, x * spec.spacing_m, y * spec.spacing_m);
            cell.network_node = 1000 + cell.id;
            w.cells.push_back(cell);
            w.network.nodes.push_back({cell.network_node, cell.centroid});
        }
    auto link = [&](int a, int b) {
        const double len = geo::great_circle_m(w.cells[static_cast<std::size_t>(a)].centroid,
                                               w.cells[static_cast<std::size_t>(b)].centroid);
        for (int dir = 0; dir < 2; ++dir) {
            const double speed = spec.speed_mps * (1.0 + spec.speed_jitter * uniform_real(rng, -1.0, 1.0));
            w.network.edges.push_back({dir ? b : a, dir ? a : b, len / speed});
        }
    };
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            const int k = r * spec.cols + c;
            if (c + 1 < spec.cols) link(k, k + 1);
            if (r + 1 < spec.rows) {
                link(k, k + spec.cols);
                if (spec.hex) {
                    const int dc = r % 2 == 1 ? 1 : -1;
                    if (c + dc >= 0 && c + dc < spec.cols) link(k, k + spec.cols + dc);
                }
            }
        }

    std::vector<int> hubs;
    for (int h = 0; h < spec.hotspots; ++h) hubs.push_back(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n))));
    auto grid_dist = [&](int a, int b) {
        const double dx = xy[static_cast<std::size_t>(a)].first - xy[static_cast<std::size_t>(b)].first;
        const double dy = xy[static_cast<std::size_t>(a)].second - xy[static_cast<std::size_t>(b)].second;
        return std::sqrt(dx * dx + dy * dy);
    };
    std::vector<double> attraction(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i)
        for (int h : hubs) {
            const double d = grid_dist(i, h);
            attraction[static_cast<std::size_t>(i)] +=
                spec.intensity * std::exp(-d * d / (2.0 * spec.decay_radius * spec.decay_radius));
        }
    std::vector<DemandEntry> triples;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double keep = uniform_unit(rng);
            const double noise = uniform_real(rng, 0.5, 1.5);
            if (keep >= spec.density) continue;
            const double g = attraction[static_cast<std::size_t>(i)] * attraction[static_cast<std::size_t>(j)] *
                             std::exp(-grid_dist(i, j) / spec.gravity_length);
            const double v = std::floor(spec.demand_scale * g * noise);
            if (v > 0.0) triples.push_back({i, j, v});
        }
    w.demand = DemandMatrix::from_triples(n, std::move(triples));
    return w;
}

/// Runs the generated world through the same distance pipeline as real inputs.
inline Instance generate_instance(const SyntheticSpec& spec) {
    SyntheticWorld w = generate_world(spec);
    Instance inst;
    const auto nodes = map_cells_to_nodes(w.cells, w.network);
    for (std::size_t k = 0; k < w.cells.size(); ++k) w.cells[k].network_node = nodes[k];
    inst.distances = normalize(static_cast<int>(w.cells.size()), shortest_path_matrix(w.network, nodes, 1));
    inst.cells = std::move(w.cells);
    inst.demand = std::move(w.demand);
    inst.params = spec.params;
    inst.provenance = {{"generator", "synthetic"}, {"spec", synthetic_spec_to_json(spec)}};
    inst.validate();
    return inst;
}

}  // namespace mzp
