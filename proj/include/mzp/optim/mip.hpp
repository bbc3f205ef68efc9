#pragma once
/// Best-bound branch and bound over the integer-flagged variables of a
/// LinearModel, branching on the most fractional one (lowest index on ties).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <memory>
#include <vector>

#include "mzp/optim/lp.hpp"

namespace mzp::optim {

enum class MipStatus { optimal, infeasible, limit, numerical_failure };

inline const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::optimal: return "optimal";
        case MipStatus::infeasible: return "infeasible";
        case MipStatus::limit: return "limit";
        case MipStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

/// Turns a fractional LP point into a candidate integer point (or nothing).
/// Candidates are checked against the model before they are accepted.
using RoundingHeuristic = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

struct MipOptions {
    double time_limit = kInf;
    double gap_tol = Tolerances::mip_gap;  ///< relative
    double abs_gap_tol = 1e-9;
    long node_limit = 50'000'000;
    /// Only solutions strictly better than this are of interest; subtrees
    /// whose bound does not exceed it are pruned.
    std::optional<double> cutoff;
    std::optional<std::vector<double>> initial_solution;
    RoundingHeuristic heuristic;
};

struct MipSolution {
    MipStatus status = MipStatus::numerical_failure;
    bool has_incumbent = false;
    std::vector<double> primal;
    double objective = -kInf;
    double bound = kInf;  ///< best proven upper bound (maximization)
    double gap = kInf;
    long node_count = 0;
};

namespace detail {

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    double parent_bound;
    long id;
    std::vector<BoundChange> changes;
    LpBasis basis;
};

struct NodeOrder {
    bool operator()(const Node* a, const Node* b) const {
        if (a->parent_bound != b->parent_bound) return a->parent_bound < b->parent_bound;
        return a->id > b->id;
    }
};

}  // namespace detail

/// Check a point against bounds, rows and integrality.
inline bool is_mip_feasible(const LinearModel& model, const std::vector<double>& x,
                            double tol = Tolerances::feasibility * 10) {
    if (static_cast<int>(x.size()) != model.num_variables()) return false;
    if (model.max_violation(x) > tol) return false;
    for (int j = 0; j < model.num_variables(); ++j)
        if (model.variable(j).integer &&
            std::abs(x[static_cast<std::size_t>(j)] - std::round(x[static_cast<std::size_t>(j)])) >
                Tolerances::integrality)
            return false;
    return true;
}

inline MipSolution solve_mip(const LinearModel& model, const MipOptions& options = {}) {
    Deadline deadline(options.time_limit);
    MipSolution out;
    SimplexSolver lp(model);
    const int n = model.num_variables();

    std::vector<double> root_lo(static_cast<std::size_t>(n)), root_up(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& v = model.variable(j);
        root_lo[static_cast<std::size_t>(j)] = v.integer ? std::ceil(v.lower - Tolerances::integrality) : v.lower;
        root_up[static_cast<std::size_t>(j)] = v.integer ? std::floor(v.upper + Tolerances::integrality) : v.upper;
    }

    auto offer = [&](std::vector<double> x) {
        for (int j = 0; j < n; ++j)
            if (model.variable(j).integer)
                x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]);
        if (!is_mip_feasible(model, x)) return;
        const double obj = model.objective_value(x);
        if (!out.has_incumbent || obj > out.objective + 1e-12) {
            out.has_incumbent = true;
            out.objective = obj;
            out.primal = std::move(x);
        }
    };
    if (options.initial_solution) offer(*options.initial_solution);

    auto threshold = [&]() {
        double t = -kInf;
        if (out.has_incumbent)
            t = out.objective + std::max(options.abs_gap_tol, options.gap_tol * std::abs(out.objective));
        if (options.cutoff) t = std::max(t, *options.cutoff);
        return t;
    };

    std::vector<std::unique_ptr<detail::Node>> open;  // max-heap on NodeOrder
    const auto order = [](const std::unique_ptr<detail::Node>& a,
                          const std::unique_ptr<detail::Node>& b) {
        return detail::NodeOrder{}(a.get(), b.get());
    };
    long next_id = 0;
    auto push = [&](double bound, std::vector<detail::BoundChange> ch, LpBasis basis) {
        open.push_back(std::make_unique<detail::Node>(
            detail::Node{bound, next_id++, std::move(ch), std::move(basis)}));
        std::push_heap(open.begin(), open.end(), order);
    };
    auto pop = [&]() {
        std::pop_heap(open.begin(), open.end(), order);
        auto node = std::move(open.back());
        open.pop_back();
        return node;
    };
    push(kInf, {}, {});

    bool numerical_trouble = false;
    bool stopped = false;
    double pruned_bound = -kInf;  // best bound among subtrees discarded by the gap test

    while (!open.empty()) {
        if (deadline.expired() || out.node_count >= options.node_limit) {
            stopped = true;
            break;
        }
        auto node = pop();
        if (node->parent_bound <= threshold()) {
            pruned_bound = std::max(pruned_bound, node->parent_bound);
            continue;
        }

        for (int j = 0; j < n; ++j)
            lp.set_bounds(j, root_lo[static_cast<std::size_t>(j)], root_up[static_cast<std::size_t>(j)]);
        bool empty_box = false;
        for (const auto& c : node->changes) {
            const double lo = std::max(lp.lower(c.var), c.lower);
            const double up = std::min(lp.upper(c.var), c.upper);
            if (lo > up) empty_box = true;
            lp.set_bounds(c.var, lo, up);
        }
        ++out.node_count;
        if (empty_box) continue;

        LpOptions lpo;
        lpo.time_limit = std::max(0.0, deadline.remaining());
        lpo.warm_start = node->basis.empty() ? nullptr : &node->basis;
        LpSolution rel = lp.solve(lpo);
        if (rel.status == LpStatus::limit) {
            // put the node back so the reported bound stays valid
            push(node->parent_bound, std::move(node->changes), {});
            stopped = true;
            break;
        }
        if (rel.status == LpStatus::infeasible) continue;
        if (rel.status != LpStatus::optimal) {
            numerical_trouble = true;
            continue;
        }
        const double node_bound = std::min(rel.objective, node->parent_bound);
        if (node_bound <= threshold()) {
            pruned_bound = std::max(pruned_bound, node_bound);
            continue;
        }

        int branch_var = -1;
        double best_frac = Tolerances::integrality;
        for (int j = 0; j < n; ++j) {
            if (!model.variable(j).integer) continue;
            const double v = rel.primal[static_cast<std::size_t>(j)];
            const double frac = std::abs(v - std::round(v));
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            offer(rel.primal);
            pruned_bound = std::max(pruned_bound, std::min(node_bound, model.objective_value(rel.primal)));
            continue;
        }
        if (options.heuristic)
            if (auto cand = options.heuristic(rel.primal)) offer(std::move(*cand));
        if (node_bound <= threshold()) {
            pruned_bound = std::max(pruned_bound, node_bound);
            continue;
        }

        const double v = rel.primal[static_cast<std::size_t>(branch_var)];
        auto down = node->changes;
        down.push_back({branch_var, -kInf, std::floor(v)});
        auto up = std::move(node->changes);
        up.push_back({branch_var, std::ceil(v), kInf});
        push(node_bound, std::move(down), rel.basis);
        push(node_bound, std::move(up), std::move(rel.basis));
    }

    double bound = out.has_incumbent ? out.objective : -kInf;
    bound = std::max(bound, pruned_bound);
    for (const auto& node : open) bound = std::max(bound, node->parent_bound);
    out.bound = bound;
    if (out.has_incumbent)
        out.gap = std::max(0.0, out.bound - out.objective) / std::max(1.0, std::abs(out.objective));

    if (stopped) {
        out.status = MipStatus::limit;
    } else if (numerical_trouble) {
        out.status = MipStatus::numerical_failure;
    } else if (out.has_incumbent) {
        out.status = MipStatus::optimal;
    } else {
        out.status = MipStatus::infeasible;
    }
    return out;
}

}  // namespace mzp::optim
