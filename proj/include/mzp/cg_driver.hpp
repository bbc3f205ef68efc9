#pragma once
/// Column generation: alternate the master LP and pricing until no improving
/// zone is found or a limit is hit, then solve the integer master once.

#include <string>
#include <vector>

#include "mzp/pricing.hpp"
#include "mzp/rmp.hpp"

namespace mzp {

enum class PricingMode { exact, heuristic, hybrid };

inline const char* to_string(PricingMode m) {
    switch (m) {
        case PricingMode::exact: return "exact";
        case PricingMode::heuristic: return "heuristic";
        case PricingMode::hybrid: return "hybrid";
    }
    return "?";
}

inline PricingMode parse_pricing_mode(const std::string& s) {
    if (s == "exact") return PricingMode::exact;
    if (s == "heuristic") return PricingMode::heuristic;
    if (s == "hybrid") return PricingMode::hybrid;
    throw InputError("unknown pricing mode '" + s + "' (expected exact, heuristic or hybrid)");
}

struct CgConfig {
    PricingMode pricing = PricingMode::heuristic;
    double total_time_limit = kInf;    ///< column generation loop
    double pricing_time_limit = kInf;  ///< per pricing call
    double final_time_limit = 60.0;    ///< integer master
    int runs = 10;
    std::uint64_t seed = 0;
    bool perturb = true;
    long max_iterations = 10'000;

    void validate() const {
        if (!(total_time_limit >= 0.0)) throw InputError("time limit must be >= 0");
        if (!(pricing_time_limit > 0.0)) throw InputError("pricing time limit must be > 0");
        if (!(final_time_limit >= 0.0)) throw InputError("final time limit must be >= 0");
        if (runs < 1) throw InputError("runs must be >= 1");
        if (max_iterations < 0) throw InputError("max_iterations must be >= 0");
    }
};

struct CgIteration {
    long iteration = 0;
    std::size_t pool_size = 0;
    double lp_objective = 0.0;
    double lambda = 0.0;
    double max_pi = 0.0;
    int columns_added = 0;
    double best_reduced_cost = -kInf;
    std::string method;
    bool proven = false;
    long lp_iterations = 0;
    double wall_time = 0.0;
};

struct CgTrace {
    std::vector<CgIteration> iterations;
    std::string termination = "converged";  ///< converged | timeout | iteration_cap
    std::size_t initial_pool_size = 0;
    double epsilon_slack = 0.0;
    double cg_time = 0.0;
    double final_time = 0.0;
    /// Duals and objective of the last master LP solved.
    Duals final_duals;
    double final_lp_objective = 0.0;
};

struct CgResult {
    Solution solution;
    CgTrace trace;
    ColumnPool pool;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seed zones from a demand-greedy heuristic pass (pi = d, lambda = 0),
/// falling back to a random affordable pair.
inline ColumnPool initialize_pool(const Instance& inst, const CgConfig& config) {
    if (inst.params.enforce_zone_budget && inst.params.zone_budget < inst.params.beta)
        throw InfeasibleError("single-zone budget B0 = " + std::to_string(inst.params.zone_budget) +
                              " is below the fixed zone cost beta = " + std::to_string(inst.params.beta));
    inst.params.validate();
    ColumnPool pool;
    Duals surrogate;
    for (const auto& e : inst.demand.entries())
        if (e.from != e.to || inst.params.include_self_pairs) surrogate.pi.push_back({e.from, e.to, e.value});
    HeuristicPricingOptions ho;
    ho.runs = config.runs;
    ho.seed = detail::mix_seed(config.seed, 1);
    for (const auto& pz : heuristic_pricing(surrogate, inst, ho).zones) pool.add(pz.zone, inst.params, ZoneSource::initial, 0);
    if (!pool.empty()) return pool;

    const int n = inst.size();
    Rng rng(detail::mix_seed(config.seed, 2));
    const auto attempts = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
    for (std::uint64_t t = 0; n >= 2 && t < attempts; ++t) {
        const auto a = static_cast<CellId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        const auto b = static_cast<CellId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        if (a == b) continue;
        Zone z = Zone::make({a, b}, inst.distances, inst.params);
        if (inst.params.zone_affordable(z.diameter_sq())) {
            pool.add(z, inst.params, ZoneSource::initial, 0);
            return pool;
        }
    }
    for (CellId a = 0; a < n; ++a)
        for (CellId b = a + 1; b < n; ++b) {
            Zone z = Zone::make({a, b}, inst.distances, inst.params);
            if (inst.params.zone_affordable(z.diameter_sq())) {
                pool.add(z, inst.params, ZoneSource::initial, 0);
                return pool;
            }
        }
    throw InfeasibleError("no pair of cells fits the single-zone budget B0 = " + std::to_string(inst.params.zone_budget));
}

/// Root-only column generation followed by one integer master solve.
inline CgResult run_cg(const Instance& inst, const CgConfig& config) {
    inst.validate();
    config.validate();
    Deadline clock(config.total_time_limit);
    CgResult res;
    res.pool = initialize_pool(inst, config);
    res.trace.initial_pool_size = res.pool.size();

    RmpBuild build = build_rmp(res.pool, inst, config.perturb, detail::mix_seed(config.seed, 3));
    res.trace.epsilon_slack = epsilon_slack_bound(build);
    optim::LpBasis basis;
    std::optional<Zone> last_exact;

    for (long it = 0;; ++it) {
        if (clock.expired()) {
            res.trace.termination = "timeout";
            break;
        }
        if (it >= config.max_iterations) {
            res.trace.termination = "iteration_cap";
            break;
        }
        const auto lp = solve_rmp_lp(build, basis.empty() ? nullptr : &basis, clock.remaining());
        if (lp.lp.status == optim::LpStatus::limit) {
            res.trace.termination = "timeout";
            break;
        }
        basis = lp.lp.basis;
        res.trace.final_duals = lp.duals;
        res.trace.final_lp_objective = lp.lp.objective;

        CgIteration rec;
        rec.iteration = it;
        rec.lp_objective = lp.lp.objective;
        rec.lambda = lp.duals.lambda;
        for (const auto& p : lp.duals.pi) rec.max_pi = std::max(rec.max_pi, p.value);
        rec.lp_iterations = lp.lp.iterations;

        const double budget = std::min(config.pricing_time_limit, clock.remaining());
        auto heuristic = [&] {
            HeuristicPricingOptions ho;
            ho.runs = config.runs;
            ho.run_time_limit = budget;
            ho.seed = detail::mix_seed(config.seed, 100 + static_cast<std::uint64_t>(it));
            return heuristic_pricing(lp.duals, inst, ho);
        };
        auto exact = [&] {
            ExactPricingOptions eo;
            eo.time_limit = budget;
            eo.hint = last_exact;
            return exact_pricing(lp.duals, inst, eo);
        };
        PricingResult pr;
        int added = 0;
        bool cut = false;
        auto absorb = [&](const PricingResult& r) {
            // columns from a call the deadline interrupted are dropped, so the
            // pool under any limit is a prefix of the unlimited run's pool
            if (clock.expired()) {
                cut = true;
                return;
            }
            for (const auto& pz : r.zones)
                if (res.pool.add(pz.zone, inst.params,
                                 r.method == PricingMethod::exact ? ZoneSource::exact : ZoneSource::heuristic,
                                 static_cast<int>(it) + 1)) {
                    build.add_zone(pz.zone, inst.params.include_self_pairs);
                    ++added;
                }
        };
        if (config.pricing == PricingMode::exact) {
            pr = exact();
            absorb(pr);
        } else {
            pr = heuristic();
            absorb(pr);
            if (added == 0 && !cut && config.pricing == PricingMode::hybrid) {
                pr = exact();
                absorb(pr);
            }
        }
        if (cut) {
            res.trace.termination = "timeout";
            break;
        }
        if (pr.method == PricingMethod::exact && !pr.zones.empty()) last_exact = pr.zones.front().zone;

        rec.columns_added = added;
        rec.best_reduced_cost = pr.best_reduced_cost;
        rec.method = to_string(pr.method);
        rec.proven = pr.method == PricingMethod::exact && pr.proven;
        rec.pool_size = res.pool.size();
        rec.wall_time = clock.elapsed();
        res.trace.iterations.push_back(rec);

        if (added == 0) {
            const bool certified = pr.method == PricingMethod::heuristic || pr.proven;
            res.trace.termination = certified ? "converged" : "timeout";
            break;
        }
    }
    res.trace.cg_time = clock.elapsed();

    Deadline final_clock;
    const auto integer = build_rmp(res.pool, inst, false, 0, true);
    res.solution = solve_rmp_mip(integer, res.pool, inst, config.final_time_limit);
    res.trace.final_time = final_clock.elapsed();
    return res;
}

}  // namespace mzp
