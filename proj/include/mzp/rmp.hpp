#pragma once
/// Restricted master problem over a column pool: LP relaxation for duals,
/// integer version for the final zone selection.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mzp/core_model.hpp"
#include "mzp/ingest.hpp"
#include "mzp/optim/mip.hpp"

namespace mzp {

enum class ZoneSource { initial, exact, heuristic, enumeration };

inline const char* to_string(ZoneSource s) {
    switch (s) {
        case ZoneSource::initial: return "initial";
        case ZoneSource::exact: return "exact";
        case ZoneSource::heuristic: return "heuristic";
        case ZoneSource::enumeration: return "enumeration";
    }
    return "?";
}

/// Candidate zones, unique by cell set, with the round and method that produced each.
class ColumnPool {
public:
    /// Returns false for duplicates. Zones over the single-zone budget are rejected.
    bool add(const Zone& zone, const CostParams& params, ZoneSource source = ZoneSource::initial, int round = 0) {
        if (!params.zone_affordable(zone.diameter_sq()))
            throw InputError("zone cost " + std::to_string(zone.cost()) + " exceeds the single-zone budget");
        std::vector<CellId> key(zone.cells().begin(), zone.cells().end());
        if (!seen_.insert(std::move(key)).second) return false;
        zones_.push_back(zone);
        sources_.push_back(source);
        rounds_.push_back(round);
        return true;
    }

    bool contains(const Zone& zone) const {
        return seen_.count(std::vector<CellId>(zone.cells().begin(), zone.cells().end())) > 0;
    }

    std::size_t size() const { return zones_.size(); }
    bool empty() const { return zones_.empty(); }
    const std::vector<Zone>& zones() const { return zones_; }
    const Zone& zone(std::size_t k) const { return zones_[k]; }
    ZoneSource source(std::size_t k) const { return sources_[k]; }
    int round(std::size_t k) const { return rounds_[k]; }

private:
    std::vector<Zone> zones_;
    std::vector<ZoneSource> sources_;
    std::vector<int> rounds_;
    std::set<std::vector<CellId>> seen_;
};

/// Demand pairs that get a w variable and a linking row.
inline std::vector<DemandEntry> linked_pairs(const Instance& inst) {
    std::vector<DemandEntry> out;
    for (const auto& e : inst.demand.entries())
        if (e.from != e.to || inst.params.include_self_pairs) out.push_back(e);
    return out;
}

/// Variables: w for each linked pair (in pair order), then x for each zone.
/// Rows: the budget row, then one linking row per pair.
struct RmpBuild {
    optim::LinearModel model;
    std::vector<DemandEntry> pairs;
    std::vector<double> epsilons;
    std::vector<int> pair_lookup;  ///< n*n table: pair index or -1
    bool perturbed = false;
    int n = 0;
    int num_zones = 0;
    double x_upper = 1.0;

    static constexpr int budget_row = 0;
    int num_pairs() const { return static_cast<int>(pairs.size()); }
    int w_var(int k) const { return k; }
    int x_var(int zone) const { return num_pairs() + zone; }
    int linking_row(int k) const { return 1 + k; }

    int pair_index(CellId i, CellId j) const {
        return pair_lookup[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }

    void add_zone(const Zone& zone, bool self_pairs) {
        const int x = model.add_variable(0.0, x_upper, 0.0, true);
        model.add_term(budget_row, x, zone.cost());
        for (CellId a : zone.cells())
            for (CellId b : zone.cells()) {
                if (a == b && !self_pairs) continue;
                const int k = pair_index(a, b);
                if (k >= 0) model.add_term(linking_row(k), x, -1.0);
            }
        ++num_zones;
    }
};

inline constexpr double kEpsilonMax = 1e-4;

/// Largest x any zone can take in the LP relaxation. It never binds, because
/// the budget row already caps x at B / cost <= B / beta.
inline double lp_x_upper(const CostParams& p) { return p.budget / p.beta + 1.0; }

inline RmpBuild build_rmp(const ColumnPool& pool, const Instance& inst, bool perturb, std::uint64_t seed,
                          bool integer = false) {
    RmpBuild b;
    b.n = inst.size();
    b.perturbed = perturb;
    b.x_upper = integer ? 1.0 : lp_x_upper(inst.params);
    b.pairs = linked_pairs(inst);
    b.pair_lookup.assign(static_cast<std::size_t>(b.n) * static_cast<std::size_t>(b.n), -1);
    Rng rng(seed);
    b.model.add_row({}, optim::RowSense::le, inst.params.budget);
    for (int k = 0; k < b.num_pairs(); ++k) {
        const auto& e = b.pairs[static_cast<std::size_t>(k)];
        b.pair_lookup[static_cast<std::size_t>(e.from) * static_cast<std::size_t>(b.n) + static_cast<std::size_t>(e.to)] = k;
        const double eps = perturb ? uniform_real(rng, 0.0, kEpsilonMax) : 0.0;
        b.epsilons.push_back(eps);
        const int w = b.model.add_variable(0.0, 1.0, e.value, true);
        b.model.add_row({{w, 1.0}}, optim::RowSense::le, eps);
    }
    for (const auto& z : pool.zones()) b.add_zone(z, inst.params.include_self_pairs);
    return b;
}

/// Upper bound on how much the perturbation can inflate the LP objective.
inline double epsilon_slack_bound(const RmpBuild& b) {
    double s = 0.0;
    for (int k = 0; k < b.num_pairs(); ++k)
        s += b.pairs[static_cast<std::size_t>(k)].value * b.epsilons[static_cast<std::size_t>(k)];
    return s;
}

struct RmpLpResult {
    optim::LpSolution lp;
    Duals duals;
};

inline RmpLpResult solve_rmp_lp(const RmpBuild& b, const optim::LpBasis* warm = nullptr,
                                double time_limit = kInf) {
    optim::LpOptions opts;
    opts.warm_start = warm;
    opts.time_limit = time_limit;
    RmpLpResult out;
    out.lp = optim::solve_lp(b.model, opts);
    if (out.lp.status == optim::LpStatus::limit) return out;
    if (out.lp.status != optim::LpStatus::optimal)
        throw SolverError(std::string("restricted master LP: ") + optim::to_string(out.lp.status));
    out.duals.lambda = std::max(0.0, out.lp.duals[RmpBuild::budget_row]);
    for (int k = 0; k < b.num_pairs(); ++k) {
        const double pi = out.lp.duals[static_cast<std::size_t>(b.linking_row(k))];
        if (pi > 0.0) {
            const auto& e = b.pairs[static_cast<std::size_t>(k)];
            out.duals.pi.push_back({e.from, e.to, pi});
        }
    }
    return out;
}

struct Solution {
    std::vector<Zone> zones;
    double covered_demand = 0.0;
    double countable_demand = 0.0;
    double total_cost = 0.0;
    std::string status = "optimal";  ///< optimal | limit | infeasible
    double bound = 0.0;
    double gap = 0.0;

    double coverage() const { return countable_demand > 0.0 ? covered_demand / countable_demand : 0.0; }
};

/// Fill in coverage and cost from the zone list alone.
inline void recompute_metrics(Solution& s, const Instance& inst) {
    std::sort(s.zones.begin(), s.zones.end());
    s.covered_demand = covered_demand(s.zones, inst.demand, inst.params.include_self_pairs);
    s.countable_demand = countable_demand(inst.demand, inst.params.include_self_pairs);
    s.total_cost = 0.0;
    for (const auto& z : s.zones) s.total_cost += z.cost();
}

namespace detail {

/// The integer master with pairs merged by covering-zone signature: one
/// continuous group variable per distinct nonempty signature. With x binary
/// every group variable settles at 0 or 1, so this has the same optimum.
struct CompactMaster {
    optim::LinearModel model;
    int num_zones = 0;
    std::vector<std::vector<int>> groups;  ///< zones covering each group

    std::vector<double> point(const std::vector<char>& chosen) const {
        std::vector<double> x(static_cast<std::size_t>(model.num_variables()), 0.0);
        for (int z = 0; z < num_zones; ++z) x[static_cast<std::size_t>(z)] = chosen[static_cast<std::size_t>(z)] ? 1.0 : 0.0;
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (int z : groups[g])
                if (chosen[static_cast<std::size_t>(z)]) {
                    x[static_cast<std::size_t>(num_zones) + g] = 1.0;
                    break;
                }
        return x;
    }
};

inline CompactMaster compact_master(const RmpBuild& b, const ColumnPool& pool, double budget) {
    CompactMaster cm;
    cm.num_zones = b.num_zones;
    std::vector<optim::Term> budget_terms;
    for (int z = 0; z < b.num_zones; ++z) {
        cm.model.add_variable(0.0, 1.0, 0.0, true);
        budget_terms.push_back({z, pool.zone(static_cast<std::size_t>(z)).cost()});
    }
    cm.model.add_row(std::move(budget_terms), optim::RowSense::le, budget);
    std::map<std::vector<int>, double> by_signature;
    for (int k = 0; k < b.num_pairs(); ++k) {
        std::vector<int> sig;
        for (const auto& t : b.model.row(b.linking_row(k)).terms)
            if (t.var != b.w_var(k)) sig.push_back(t.var - b.num_pairs());
        if (sig.empty()) continue;
        std::sort(sig.begin(), sig.end());
        by_signature[sig] += b.pairs[static_cast<std::size_t>(k)].value;
    }
    for (auto& [sig, demand] : by_signature) {
        const int g = cm.model.add_variable(0.0, 1.0, demand);
        std::vector<optim::Term> terms{{g, 1.0}};
        for (int z : sig) terms.push_back({z, -1.0});
        cm.model.add_row(std::move(terms), optim::RowSense::le, 0.0);
        cm.groups.push_back(sig);
    }
    return cm;
}

/// Zones taken greedily in `order` while the budget allows.
inline std::vector<char> greedy_fill(const ColumnPool& pool, double budget, const std::vector<int>& order) {
    std::vector<char> chosen(pool.size(), 0);
    double spent = 0.0;
    for (int z : order) {
        const double c = pool.zone(static_cast<std::size_t>(z)).cost();
        if (spent + c <= budget + 1e-9) {
            spent += c;
            chosen[static_cast<std::size_t>(z)] = 1;
        }
    }
    return chosen;
}

/// Greedy by marginal covered demand per unit cost.
inline std::vector<int> marginal_order(const CompactMaster& cm, const ColumnPool& pool, double budget) {
    std::vector<std::vector<int>> groups_of(static_cast<std::size_t>(cm.num_zones));
    for (std::size_t g = 0; g < cm.groups.size(); ++g)
        for (int z : cm.groups[g]) groups_of[static_cast<std::size_t>(z)].push_back(static_cast<int>(g));
    std::vector<char> used(static_cast<std::size_t>(cm.num_zones), 0), covered(cm.groups.size(), 0);
    std::vector<int> order;
    double spent = 0.0;
    while (true) {
        int best = -1;
        double best_score = 0.0;
        for (int z = 0; z < cm.num_zones; ++z) {
            if (used[static_cast<std::size_t>(z)]) continue;
            const double cost = pool.zone(static_cast<std::size_t>(z)).cost();
            if (spent + cost > budget + 1e-9) continue;
            double gain = 0.0;
            for (int g : groups_of[static_cast<std::size_t>(z)])
                if (!covered[static_cast<std::size_t>(g)])
                    gain += cm.model.variable(cm.num_zones + g).objective;
            if (gain / cost > best_score) {
                best_score = gain / cost;
                best = z;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = 1;
        order.push_back(best);
        spent += pool.zone(static_cast<std::size_t>(best)).cost();
        for (int g : groups_of[static_cast<std::size_t>(best)]) covered[static_cast<std::size_t>(g)] = 1;
    }
    return order;
}

}  // namespace detail

/// Integer RMP with zero perturbation. Coverage is recomputed from the union
/// of the selected zones.
inline Solution solve_rmp_mip(const RmpBuild& b, const ColumnPool& pool, const Instance& inst,
                              double time_limit = kInf) {
    if (b.perturbed) throw InputError("solve_rmp_mip: the integer master must be built without perturbation");
    if (static_cast<std::size_t>(b.num_zones) != pool.size()) throw InputError("solve_rmp_mip: build does not match pool");
    const double budget = inst.params.budget;
    const auto cm = detail::compact_master(b, pool, budget);

    optim::MipOptions opts;
    opts.time_limit = time_limit;
    opts.initial_solution = cm.point(detail::greedy_fill(pool, budget, detail::marginal_order(cm, pool, budget)));
    opts.heuristic = [&](const std::vector<double>& lp) -> std::optional<std::vector<double>> {
        std::vector<int> order(static_cast<std::size_t>(cm.num_zones));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
            return lp[static_cast<std::size_t>(a)] > lp[static_cast<std::size_t>(c)];
        });
        return cm.point(detail::greedy_fill(pool, budget, order));
    };
    const auto mip = optim::solve_mip(cm.model, opts);

    Solution s;
    if (!mip.has_incumbent) {
        if (mip.status == optim::MipStatus::numerical_failure)
            throw SolverError("restricted master MIP: numerical failure");
        s.status = mip.status == optim::MipStatus::limit ? "limit" : "infeasible";
        recompute_metrics(s, inst);
        s.bound = mip.bound;
        return s;
    }
    for (int z = 0; z < cm.num_zones; ++z)
        if (mip.primal[static_cast<std::size_t>(z)] > 0.5) s.zones.push_back(pool.zone(static_cast<std::size_t>(z)));
    recompute_metrics(s, inst);
    s.status = mip.status == optim::MipStatus::optimal ? "optimal" : "limit";
    s.bound = std::max(mip.bound, s.covered_demand);
    s.gap = s.bound > 0.0 ? (s.bound - s.covered_demand) / s.bound : 0.0;
    return s;
}

}  // namespace mzp
