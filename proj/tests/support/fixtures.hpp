#pragma once

#include "mzp/synthetic.hpp"

namespace mzp::testing {

/// Instance from explicit matrices; cells sit on a line, centroids unused.
inline Instance make_instance(int n, std::vector<double> dist, std::vector<DemandEntry> demand,
                              CostParams params = {}) {
    Instance inst;
    for (int i = 0; i < n; ++i) inst.cells.push_back({i, {35.0, -85.0 + 0.01 * i}, -1, {}});
    inst.distances = DistanceMatrix(n, std::move(dist));
    inst.demand = DemandMatrix::from_triples(n, std::move(demand));
    inst.params = params;
    inst.validate();
    return inst;
}

/// Random instance with integer demand and normalized asymmetric distances.
inline Instance random_instance(Rng& rng, int n, double density = 0.6, CostParams params = {}) {
    std::vector<double> d(static_cast<std::size_t>(n * n), 0.0);
    double mx = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                d[static_cast<std::size_t>(i * n + j)] = 0.05 + uniform_unit(rng);
                mx = std::max(mx, d[static_cast<std::size_t>(i * n + j)]);
            }
    for (double& v : d) v /= mx;
    std::vector<DemandEntry> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (uniform_unit(rng) < density) t.push_back({i, j, 1.0 + static_cast<double>(uniform_index(rng, 9))});
    return make_instance(n, std::move(d), std::move(t), params);
}

inline Instance grid_instance(int rows, int cols, std::uint64_t seed, int hotspots = 2) {
    SyntheticSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.seed = seed;
    spec.hotspots = hotspots;
    return generate_instance(spec);
}

inline Duals random_duals(Rng& rng, const Instance& inst, double lambda_max = 2.0, double density = 0.5) {
    Duals d;
    d.lambda = uniform_real(rng, 0.0, lambda_max);
    const int n = inst.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && uniform_unit(rng) < density) d.pi.push_back({i, j, uniform_real(rng, 0.0, 3.0)});
    return d;
}

}  // namespace mzp::testing
