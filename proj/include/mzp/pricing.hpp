#pragma once
/// Pricing: find zones with positive reduced cost under the current duals.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mzp/ingest.hpp"
#include "mzp/optim/mip.hpp"

namespace mzp {

inline constexpr double kPricingTol = 1e-6;

enum class PricingMethod { exact, heuristic };

inline const char* to_string(PricingMethod m) { return m == PricingMethod::exact ? "exact" : "heuristic"; }

struct PricedZone {
    Zone zone;
    double reduced_cost = 0.0;
};

struct PricingResult {
    std::vector<PricedZone> zones;  ///< reduced cost > tolerance, best first
    double best_reduced_cost = -kInf;  ///< best value seen, kept or not
    PricingMethod method = PricingMethod::heuristic;
    bool proven = false;  ///< exact only: optimality of the search was proven
    double elapsed = 0.0;
    int runs_attempted = 0;
    int runs_skipped = 0;

    bool empty() const { return zones.empty(); }
};

/// Dense view of the duals: pi(i, j) with zeros off the support.
class DualMatrix {
public:
    DualMatrix(const Duals& duals, int n) : n_(n), v_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {
        for (const auto& p : duals.pi) {
            if (p.from < 0 || p.from >= n || p.to < 0 || p.to >= n)
                throw InputError("dual for pair (" + std::to_string(p.from) + "," + std::to_string(p.to) +
                                 ") outside the instance");
            if (!std::isfinite(p.value)) throw InputError("non-finite dual value");
            v_[static_cast<std::size_t>(p.from) * static_cast<std::size_t>(n) + static_cast<std::size_t>(p.to)] += p.value;
        }
    }
    double operator()(CellId i, CellId j) const {
        return v_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }

private:
    int n_;
    std::vector<double> v_;
};

namespace detail {

inline void finish(PricingResult& r) {
    std::sort(r.zones.begin(), r.zones.end(), [](const PricedZone& a, const PricedZone& b) {
        if (a.reduced_cost != b.reduced_cost) return a.reduced_cost > b.reduced_cost;
        return a.zone < b.zone;
    });
}

inline void check_duals(const Duals& duals) {
    if (!std::isfinite(duals.lambda) || duals.lambda < 0.0) throw InputError("lambda must be finite and >= 0");
}

}  // namespace detail

struct ExactPricingOptions {
    double time_limit = kInf;
    /// Optional starting zone handed to branch and bound as its first incumbent.
    std::optional<Zone> hint;
};

/// Linearized pricing MIP. Binary z per candidate cell; the squared
/// diameter is written as a staircase over the distinct pair distances,
/// u_l = [D^2 >= t_l] with u nonincreasing in l. A pair at level l needs
/// u_l >= z_i + z_j - 1, and its dual mass y_ij is capped by z_i, z_j and u_l.
/// Once z is integral, u and y are integral at any optimum.
inline PricingResult exact_pricing(const Duals& duals, const Instance& inst, const ExactPricingOptions& opt = {}) {
    Deadline clock(opt.time_limit);
    detail::check_duals(duals);
    PricingResult out;
    out.method = PricingMethod::exact;
    const int n = inst.size();
    const auto& p = inst.params;
    const bool self = p.include_self_pairs;
    const DualMatrix pi(duals, n);

    // Cells outside the positive-dual support only add diameter, so they are left out.
    std::vector<char> support(static_cast<std::size_t>(n), 0);
    for (const auto& d : duals.pi)
        if (d.value > 0.0 && (d.from != d.to || self)) {
            support[static_cast<std::size_t>(d.from)] = 1;
            support[static_cast<std::size_t>(d.to)] = 1;
        }
    std::vector<CellId> cells;
    for (CellId i = 0; i < n; ++i)
        if (support[static_cast<std::size_t>(i)]) cells.push_back(i);
    if (cells.empty()) {
        out.best_reduced_cost = -duals.lambda * p.beta;
        out.proven = true;
        out.elapsed = clock.elapsed();
        return out;
    }

    const int k = static_cast<int>(cells.size());
    const double price = duals.lambda * p.alpha;
    auto sq = [&](int a, int b) {
        const double c = inst.distances.two_way(cells[static_cast<std::size_t>(a)], cells[static_cast<std::size_t>(b)]);
        return c * c;
    };
    std::vector<double> levels;
    if (price > 0.0)
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                const double c2 = sq(a, b);
                if (c2 > 0.0 && p.zone_affordable(c2)) levels.push_back(c2);
            }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    optim::LinearModel m;
    std::vector<int> z(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
        const CellId i = cells[static_cast<std::size_t>(a)];
        z[static_cast<std::size_t>(a)] = m.add_variable(0.0, 1.0, self ? pi(i, i) : 0.0, true);
    }
    std::vector<int> u(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const double step = levels[l] - (l ? levels[l - 1] : 0.0);
        u[l] = m.add_variable(0.0, 1.0, -price * step);
        if (l) m.add_row({{u[l], 1.0}, {u[l - 1], -1.0}}, optim::RowSense::le, 0.0);
    }
    struct PairVar {
        int a, b, y;
    };
    std::vector<PairVar> ys;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            const CellId i = cells[static_cast<std::size_t>(a)], j = cells[static_cast<std::size_t>(b)];
            const double c2 = sq(a, b);
            const int za = z[static_cast<std::size_t>(a)], zb = z[static_cast<std::size_t>(b)];
            if (!p.zone_affordable(c2)) {
                m.add_row({{za, 1.0}, {zb, 1.0}}, optim::RowSense::le, 1.0);
                continue;
            }
            int ul = -1;
            if (price > 0.0 && c2 > 0.0) {
                ul = u[static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), c2) - levels.begin())];
                m.add_row({{za, 1.0}, {zb, 1.0}, {ul, -1.0}}, optim::RowSense::le, 1.0);
            }
            const double w = pi(i, j) + pi(j, i);
            if (w > 0.0) {
                const int y = m.add_variable(0.0, 1.0, w);
                m.add_row({{y, 1.0}, {za, -1.0}}, optim::RowSense::le, 0.0);
                m.add_row({{y, 1.0}, {zb, -1.0}}, optim::RowSense::le, 0.0);
                if (ul >= 0) m.add_row({{y, 1.0}, {ul, -1.0}}, optim::RowSense::le, 0.0);
                ys.push_back({a, b, y});
            }
        }
    std::vector<optim::Term> nonempty;
    for (int v : z) nonempty.push_back({v, 1.0});
    m.add_row(std::move(nonempty), optim::RowSense::ge, 1.0);

    auto point_of = [&](const std::vector<char>& in) {
        std::vector<double> x(static_cast<std::size_t>(m.num_variables()), 0.0);
        double d2 = 0.0;
        for (int a = 0; a < k; ++a) {
            if (!in[static_cast<std::size_t>(a)]) continue;
            x[static_cast<std::size_t>(z[static_cast<std::size_t>(a)])] = 1.0;
            for (int b = a + 1; b < k; ++b)
                if (in[static_cast<std::size_t>(b)]) d2 = std::max(d2, sq(a, b));
        }
        for (std::size_t l = 0; l < levels.size(); ++l) x[static_cast<std::size_t>(u[l])] = levels[l] <= d2 ? 1.0 : 0.0;
        for (const auto& pv : ys)
            x[static_cast<std::size_t>(pv.y)] = in[static_cast<std::size_t>(pv.a)] && in[static_cast<std::size_t>(pv.b)] ? 1.0 : 0.0;
        return x;
    };

    optim::MipOptions mo;
    mo.time_limit = clock.remaining();
    mo.cutoff = duals.lambda * p.beta + kPricingTol;
    mo.gap_tol = 1e-9;
    mo.abs_gap_tol = 1e-9;
    if (opt.hint) {
        std::vector<char> in(static_cast<std::size_t>(k), 0);
        bool ok = true;
        for (CellId c : opt.hint->cells()) {
            auto it = std::lower_bound(cells.begin(), cells.end(), c);
            if (it == cells.end() || *it != c) ok = false;
            else in[static_cast<std::size_t>(it - cells.begin())] = 1;
        }
        if (ok) mo.initial_solution = point_of(in);
    }
    mo.heuristic = [&](const std::vector<double>& lp) -> std::optional<std::vector<double>> {
        std::vector<char> in(static_cast<std::size_t>(k), 0);
        bool any = false;
        for (int a = 0; a < k; ++a)
            if (lp[static_cast<std::size_t>(z[static_cast<std::size_t>(a)])] > 0.5) {
                in[static_cast<std::size_t>(a)] = 1;
                any = true;
            }
        if (!any) return std::nullopt;
        return point_of(in);
    };
    const auto sol = optim::solve_mip(m, mo);
    if (sol.status == optim::MipStatus::numerical_failure) throw SolverError("exact pricing: numerical failure");
    out.proven = sol.status != optim::MipStatus::limit;
    if (sol.has_incumbent) {
        std::vector<CellId> chosen;
        for (int a = 0; a < k; ++a)
            if (sol.primal[static_cast<std::size_t>(z[static_cast<std::size_t>(a)])] > 0.5)
                chosen.push_back(cells[static_cast<std::size_t>(a)]);
        Zone zone = Zone::make(std::move(chosen), inst.distances, p);
        const double rc = reduced_cost(zone, duals);
        out.best_reduced_cost = rc;
        if (rc > kPricingTol && p.zone_affordable(zone.diameter_sq())) out.zones.push_back({std::move(zone), rc});
    }
    out.elapsed = clock.elapsed();
    return out;
}

/// Greedy marginal gain of adding cell k to the zone `members` whose squared
/// diameter is `cur_d2`: dual mass linking k to the zone minus the extra
/// diameter charge. The cost constant beta cancels.
inline double marginal_gain(const DualMatrix& pi, double lambda, const Instance& inst,
                            const std::vector<CellId>& members, double cur_d2, CellId k) {
    double gain = inst.params.include_self_pairs ? pi(k, k) : 0.0;
    double d2 = cur_d2;
    for (CellId j : members) {
        gain += pi(k, j) + pi(j, k);
        const double c = inst.distances.two_way(k, j);
        d2 = std::max(d2, c * c);
    }
    return gain - lambda * inst.params.alpha * (d2 - cur_d2);
}

struct HeuristicPricingOptions {
    int runs = 10;
    double run_time_limit = kInf;
    std::uint64_t seed = 0;
};

/// Greedy pricing from random seed pairs, one independent RNG stream per run.
inline PricingResult heuristic_pricing(const Duals& duals, const Instance& inst, const HeuristicPricingOptions& opt = {}) {
    if (opt.runs < 1) throw InputError("heuristic pricing needs at least one run");
    detail::check_duals(duals);
    Deadline clock;
    PricingResult out;
    out.method = PricingMethod::heuristic;
    const int n = inst.size();
    const auto& p = inst.params;
    const bool self = p.include_self_pairs;
    const DualMatrix pi(duals, n);
    const double lam_alpha = duals.lambda * p.alpha;

    std::vector<double> gain(static_cast<std::size_t>(n)), far(static_cast<std::size_t>(n));
    std::vector<char> in(static_cast<std::size_t>(n));
    std::set<std::vector<CellId>> seen;
    const std::uint64_t attempts = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);

    for (int run = 0; run < opt.runs; ++run) {
        ++out.runs_attempted;
        if (n < 2) {
            ++out.runs_skipped;
            continue;
        }
        Deadline run_clock(opt.run_time_limit);
        Rng rng(opt.seed ^ static_cast<std::uint64_t>(run));
        CellId si = -1, sj = -1;
        for (std::uint64_t t = 0; t < attempts; ++t) {
            const auto a = static_cast<CellId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
            const auto b = static_cast<CellId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
            if (a == b) continue;
            const double c = inst.distances.two_way(a, b);
            if (p.zone_affordable(c * c)) {
                si = a;
                sj = b;
                break;
            }
        }
        if (si < 0) {
            ++out.runs_skipped;
            continue;
        }

        std::fill(in.begin(), in.end(), 0);
        std::vector<CellId> members{si, sj};
        const double c0 = inst.distances.two_way(si, sj);
        double cur = c0 * c0;
        for (CellId k = 0; k < n; ++k) {
            gain[static_cast<std::size_t>(k)] = (self ? pi(k, k) : 0.0);
            far[static_cast<std::size_t>(k)] = 0.0;
        }
        auto absorb = [&](CellId c) {
            in[static_cast<std::size_t>(c)] = 1;
            for (CellId k = 0; k < n; ++k) {
                gain[static_cast<std::size_t>(k)] += pi(k, c) + pi(c, k);
                const double d = inst.distances.two_way(k, c);
                far[static_cast<std::size_t>(k)] = std::max(far[static_cast<std::size_t>(k)], d * d);
            }
        };
        absorb(si);
        absorb(sj);
        while (!run_clock.expired()) {
            CellId best = -1;
            double best_delta = 0.0, best_d2 = 0.0;
            for (CellId k = 0; k < n; ++k) {
                if (in[static_cast<std::size_t>(k)]) continue;
                const double d2 = std::max(cur, far[static_cast<std::size_t>(k)]);
                if (!p.zone_affordable(d2)) continue;
                const double delta = gain[static_cast<std::size_t>(k)] - lam_alpha * (d2 - cur);
                if (delta > best_delta) {
                    best_delta = delta;
                    best = k;
                    best_d2 = d2;
                }
            }
            if (best < 0) break;
            members.push_back(best);
            cur = best_d2;
            absorb(best);
        }

        Zone zone = Zone::make(std::move(members), inst.distances, p);
        const double rc = reduced_cost(zone, duals);
        out.best_reduced_cost = std::max(out.best_reduced_cost, rc);
        if (rc > kPricingTol && seen.insert(std::vector<CellId>(zone.cells().begin(), zone.cells().end())).second)
            out.zones.push_back({std::move(zone), rc});
    }
    detail::finish(out);
    out.elapsed = clock.elapsed();
    return out;
}

}  // namespace mzp
