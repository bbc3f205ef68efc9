/// Generate a small synthetic city, zone it with column generation and print
/// the selected zones.

#include <cstdio>

#include "mzp/report.hpp"
#include "mzp/synthetic.hpp"

int main() {
    mzp::SyntheticSpec spec;
    spec.rows = 6;
    spec.cols = 6;
    spec.hotspots = 3;
    spec.seed = 7;
    const mzp::Instance inst = mzp::generate_instance(spec);

    mzp::CgConfig config;
    config.pricing = mzp::PricingMode::heuristic;
    config.total_time_limit = 5.0;
    config.seed = 1;
    const mzp::CgResult result = mzp::run_cg(inst, config);

    const auto report = mzp::evaluate(inst, result.solution.zones);
    std::printf("%d cells, %zu CG iterations (%s), pool of %zu zones\n", inst.size(),
                result.trace.iterations.size(), result.trace.termination.c_str(), result.pool.size());
    std::printf("covered %.1f of %.1f trips (%.2f%%), LP bound %.1f, cost %.3f of budget %.3f\n",
                report.covered_demand, report.countable_demand, 100.0 * report.coverage(),
                result.trace.final_lp_objective, report.total_cost, report.budget);
    for (std::size_t k = 0; k < report.zones.size(); ++k) {
        const auto& z = report.zones[k];
        std::printf("zone %zu: cost %.3f, demand %.1f, cells", k, z.cost, z.demand);
        for (auto c : z.cells) std::printf(" %d", c);
        std::printf("\n");
    }
    return 0;
}
