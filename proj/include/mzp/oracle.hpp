#pragma once
/// Brute-force references for small instances: subset-enumeration pricing,
/// full candidate enumeration, and two independent exact zoning methods.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "mzp/pricing.hpp"
#include "mzp/rmp.hpp"

namespace mzp {

struct OracleLimits {
    int max_cells_pricing = 15;
    int max_cells_zoning = 8;
    int max_cells_recursive = 6;
    int max_zone_size = 0;  ///< 0: no limit

    int zone_size_cap(int n) const { return max_zone_size > 0 ? std::min(max_zone_size, n) : n; }
};

namespace detail {

inline void guard(int n, int limit, const char* what) {
    if (n > limit)
        throw GuardError(std::string(what) + ": instance has " + std::to_string(n) + " cells, limit is " +
                         std::to_string(limit));
}

inline std::vector<CellId> cells_of(std::uint32_t mask) {
    std::vector<CellId> out;
    for (CellId i = 0; mask; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i);
    return out;
}

}  // namespace detail

struct OraclePricing {
    std::optional<Zone> zone;
    double reduced_cost = -kInf;
};

/// Best zone over all affordable nonempty subsets; ties go to the
/// lexicographically smallest cell set.
inline OraclePricing oracle_pricing(const Duals& duals, const Instance& inst, const OracleLimits& limits = {}) {
    const int n = inst.size();
    detail::guard(n, limits.max_cells_pricing, "oracle_pricing");
    OraclePricing best;
    const int cap = limits.zone_size_cap(n);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) > cap) continue;
        const auto cells = detail::cells_of(mask);
        Zone z = Zone::make(cells, inst.distances, inst.params);
        if (!inst.params.zone_affordable(z.diameter_sq())) continue;
        const double rc = reduced_cost(z, duals);
        if (!best.zone || rc > best.reduced_cost || (rc == best.reduced_cost && z < *best.zone)) {
            best.reduced_cost = rc;
            best.zone = std::move(z);
        }
    }
    return best;
}

/// Every affordable subset, as a pool.
inline ColumnPool enumerate_candidates(const Instance& inst, const OracleLimits& limits = {}) {
    const int n = inst.size();
    detail::guard(n, limits.max_cells_pricing, "enumerate_candidates");
    ColumnPool pool;
    const int cap = limits.zone_size_cap(n);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) > cap) continue;
        Zone z = Zone::make(detail::cells_of(mask), inst.distances, inst.params);
        if (inst.params.zone_affordable(z.diameter_sq())) pool.add(z, inst.params, ZoneSource::enumeration);
    }
    return pool;
}

/// LP relaxation of the master over every affordable subset.
inline double full_master_lp(const Instance& inst, const OracleLimits& limits = {}) {
    const auto pool = enumerate_candidates(inst, limits);
    const auto b = build_rmp(pool, inst, false, 0);
    return solve_rmp_lp(b).lp.objective;
}

/// Exact optimum by depth-first search over zone collections, tracking
/// covered pairs as a bitmask. Needs at most 8 cells (64 ordered pairs).
inline Solution recursive_optimum(const Instance& inst, const OracleLimits& limits = {}) {
    const int n = inst.size();
    detail::guard(n, std::min(limits.max_cells_recursive, 8), "recursive_optimum");
    const bool self = inst.params.include_self_pairs;
    std::vector<double> weight(static_cast<std::size_t>(n * n), 0.0);
    for (const auto& e : inst.demand.entries())
        if (e.from != e.to || self) weight[static_cast<std::size_t>(e.from * n + e.to)] = e.value;
    auto value = [&](std::uint64_t mask) {
        double s = 0.0;
        for (int b = 0; b < n * n; ++b)
            if (mask >> b & 1u) s += weight[static_cast<std::size_t>(b)];
        return s;
    };

    struct Cand {
        Zone zone;
        std::uint64_t pairs;
    };
    std::vector<Cand> cands;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        Zone z = Zone::make(detail::cells_of(mask), inst.distances, inst.params);
        if (!inst.params.zone_affordable(z.diameter_sq()) || z.cost() > inst.params.budget + 1e-9) continue;
        std::uint64_t pm = 0;
        for (CellId a : z.cells())
            for (CellId b : z.cells())
                if ((a != b || self) && weight[static_cast<std::size_t>(a * n + b)] > 0.0) pm |= std::uint64_t{1} << (a * n + b);
        if (pm == 0) continue;
        cands.push_back({std::move(z), pm});
    }
    std::stable_sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) { return value(a.pairs) > value(b.pairs); });
    std::vector<std::uint64_t> suffix(cands.size() + 1, 0);
    for (std::size_t k = cands.size(); k-- > 0;) suffix[k] = suffix[k + 1] | cands[k].pairs;

    double best = 0.0;
    std::vector<int> best_pick, pick;
    auto dfs = [&](auto&& self_fn, std::size_t idx, double left, std::uint64_t covered) -> void {
        const double here = value(covered);
        if (here > best) {
            best = here;
            best_pick = pick;
        }
        if (idx == cands.size() || value(covered | suffix[idx]) <= best) return;
        for (std::size_t k = idx; k < cands.size(); ++k) {
            const auto& c = cands[k];
            if (c.zone.cost() > left + 1e-9 || (c.pairs & ~covered) == 0) continue;
            if (value(covered | suffix[k]) <= best) return;
            pick.push_back(static_cast<int>(k));
            self_fn(self_fn, k + 1, left - c.zone.cost(), covered | c.pairs);
            pick.pop_back();
        }
    };
    dfs(dfs, 0, inst.params.budget, 0);

    Solution s;
    for (int k : best_pick) s.zones.push_back(cands[static_cast<std::size_t>(k)].zone);
    recompute_metrics(s, inst);
    s.bound = s.covered_demand;
    return s;
}

/// Exact zoning optimum: the integer master over every affordable subset.
/// On instances small enough for recursive_optimum the two are cross-checked.
inline Solution oracle_optimum(const Instance& inst, const OracleLimits& limits = {}) {
    detail::guard(inst.size(), limits.max_cells_zoning, "oracle_optimum");
    const auto pool = enumerate_candidates(inst, limits);
    const auto b = build_rmp(pool, inst, false, 0, true);
    Solution s = solve_rmp_mip(b, pool, inst);
    if (inst.size() <= limits.max_cells_recursive) {
        const auto check = recursive_optimum(inst, limits);
        if (check.covered_demand != s.covered_demand)
            throw SolverError("oracle disagreement: integer master " + std::to_string(s.covered_demand) +
                              " vs recursive search " + std::to_string(check.covered_demand));
    }
    return s;
}

}  // namespace mzp
