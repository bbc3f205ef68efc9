#pragma once
/// Bounded-variable revised primal simplex.
///
/// Rows are turned into equalities with one logical (slack) column each:
///   a.x + s = b,   s in [0, inf) for <=,  (-inf, 0] for >=,  [0, 0] for =.
/// The basis inverse is kept in product form (an eta file on top of the
/// all-slack identity basis) and rebuilt periodically. Phase 1 minimizes
/// the sum of bound violations of the basic variables, so the method can
/// start from any basis; that is what makes warm starts after bound changes
/// (branch and bound) and after column additions (column generation) cheap.
/// Pricing is Dantzig's rule, switching to Bland's smallest-index rule after
/// a run of degenerate pivots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "mzp/optim/model.hpp"
#include "mzp/util.hpp"

namespace mzp::optim {

enum class LpStatus { optimal, infeasible, unbounded, limit, numerical_failure };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::limit: return "limit";
        case LpStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper };

/// Basis snapshot: one status per structural column and per row logical.
/// A shorter `columns` vector is accepted on warm start; missing columns are
/// treated as nonbasic at their lower bound.
struct LpBasis {
    std::vector<VarStatus> columns;
    std::vector<VarStatus> rows;
    bool empty() const { return columns.empty() && rows.empty(); }
};

struct LpOptions {
    double time_limit = kInf;
    long max_iterations = 5'000'000;
    const LpBasis* warm_start = nullptr;
};

struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    std::vector<double> primal;
    std::vector<double> duals;          ///< d objective / d rhs, one per row
    std::vector<double> reduced_costs;  ///< c_j - y.A_j, one per structural
    double objective = 0.0;
    LpBasis basis;
    long iterations = 0;
};

class SimplexSolver {
public:
    explicit SimplexSolver(const LinearModel& model)
        : n_(model.num_variables()), m_(model.num_rows()) {
        model.validate();
        const auto N = static_cast<std::size_t>(n_ + m_);
        lo_.resize(N);
        up_.resize(N);
        cost_.assign(N, 0.0);
        rhs_.resize(static_cast<std::size_t>(m_));
        for (int j = 0; j < n_; ++j) {
            const auto& v = model.variable(j);
            lo_[idx(j)] = v.lower;
            up_[idx(j)] = v.upper;
            cost_[idx(j)] = v.objective;
        }
        // column-major copy of the structural matrix
        std::vector<int> count(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& row : model.rows())
            for (const auto& t : row.terms) ++count[idx(t.var) + 1];
        col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (int j = 0; j < n_; ++j) col_start_[idx(j) + 1] = col_start_[idx(j)] + count[idx(j) + 1];
        col_row_.resize(static_cast<std::size_t>(col_start_.back()));
        col_val_.resize(static_cast<std::size_t>(col_start_.back()));
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int r = 0; r < m_; ++r) {
            const auto& row = model.row(r);
            rhs_[idx(r)] = row.rhs;
            for (const auto& t : row.terms) {
                const auto at = static_cast<std::size_t>(fill[idx(t.var)]++);
                col_row_[at] = r;
                col_val_[at] = t.coef;
            }
            const auto s = idx(n_ + r);
            switch (row.sense) {
                case RowSense::le: lo_[s] = 0.0; up_[s] = kInf; break;
                case RowSense::ge: lo_[s] = -kInf; up_[s] = 0.0; break;
                case RowSense::eq: lo_[s] = 0.0; up_[s] = 0.0; break;
            }
        }
        max_cost_ = 1.0;
        for (int j = 0; j < n_; ++j) max_cost_ = std::max(max_cost_, std::abs(cost_[idx(j)]));
    }

    int num_variables() const { return n_; }
    int num_rows() const { return m_; }

    void set_bounds(int j, double lower, double upper) {
        lo_[idx(j)] = lower;
        up_[idx(j)] = upper;
    }
    double lower(int j) const { return lo_[idx(j)]; }
    double upper(int j) const { return up_[idx(j)]; }

    LpSolution solve(const LpOptions& options = {}) {
        Deadline deadline(options.time_limit);
        LpSolution out;
        install_basis(options.warm_start);

        int restarts = 0;
        bool bland = false;
        int degenerate_run = 0;
        long iter = 0;
        bool phase_one = true;

        for (;;) {
            if (iter >= options.max_iterations || (iter % 64 == 0 && deadline.expired())) {
                out.status = LpStatus::limit;
                break;
            }
            if (phase_one && total_infeasibility() <= 0.0) phase_one = false;

            compute_duals(phase_one);
            const auto [q, dir] = choose_entering(phase_one, bland);
            if (q < 0) {
                if (phase_one) {
                    out.status = LpStatus::infeasible;
                    break;
                }
                // candidate optimum: refactor and make sure no drift crept in
                reinvert();
                if (total_infeasibility() > 0.0) {
                    if (++restarts > 3) {
                        out.status = LpStatus::numerical_failure;
                        break;
                    }
                    phase_one = true;
                    continue;
                }
                compute_duals(false);
                if (choose_entering(false, false).first >= 0 && restarts++ <= 3) continue;
                out.status = LpStatus::optimal;
                break;
            }

            ftran_column(q);
            const Step step = ratio_test(q, dir, phase_one, bland);
            if (!std::isfinite(step.theta)) {
                out.status = phase_one ? LpStatus::numerical_failure : LpStatus::unbounded;
                break;
            }
            apply_step(q, dir, step);
            ++iter;

            if (step.theta <= 1e-12) {
                if (++degenerate_run > 40) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
            if (eta_pos_.size() - factor_etas_ >= kRefactorEvery) reinvert();
        }

        out.iterations = iter;
        out.primal.assign(x_.begin(), x_.begin() + n_);
        out.objective = 0.0;
        for (int j = 0; j < n_; ++j) out.objective += cost_[idx(j)] * x_[idx(j)];
        if (out.status == LpStatus::optimal) {
            compute_duals(false);
            out.duals.assign(y_.begin(), y_.end());
            out.reduced_costs.resize(static_cast<std::size_t>(n_));
            for (int j = 0; j < n_; ++j) out.reduced_costs[idx(j)] = reduced_cost(j);
        }
        out.basis = snapshot();
        return out;
    }

private:
    static constexpr std::size_t kRefactorEvery = 96;
    static constexpr double kPrimalTol = 1e-9;
    static constexpr double kPivotTol = 1e-9;

    struct Step {
        double theta = kInf;
        int leave_pos = -1;  ///< -1: entering variable flips to its other bound
        VarStatus leave_to = VarStatus::at_lower;
    };

    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }
    int total_cols() const { return n_ + m_; }
    bool is_slack(int j) const { return j >= n_; }

    double dual_tol() const { return 1e-9 * max_cost_; }

    // ---- basis bookkeeping -------------------------------------------------

    void install_basis(const LpBasis* warm) {
        const auto N = idx(total_cols());
        status_.assign(N, VarStatus::at_lower);
        std::vector<char> want_basic(N, 0);
        if (warm && !warm->empty()) {
            for (std::size_t j = 0; j < warm->columns.size() && j < idx(n_); ++j)
                status_[j] = warm->columns[j];
            for (std::size_t r = 0; r < warm->rows.size() && r < idx(m_); ++r)
                status_[idx(n_) + r] = warm->rows[r];
            for (std::size_t j = 0; j < N; ++j) want_basic[j] = status_[j] == VarStatus::basic;
        } else {
            for (int r = 0; r < m_; ++r) want_basic[idx(n_ + r)] = 1;
        }
        for (std::size_t j = 0; j < N; ++j)
            if (!want_basic[j]) status_[j] = normalize_nonbasic(static_cast<int>(j), status_[j]);
        desired_basic_ = std::move(want_basic);
        reinvert();
    }

    VarStatus normalize_nonbasic(int j, VarStatus s) const {
        const bool lo_ok = std::isfinite(lo_[idx(j)]);
        const bool up_ok = std::isfinite(up_[idx(j)]);
        if (s == VarStatus::at_upper && up_ok) return s;
        if (lo_ok) return VarStatus::at_lower;
        return VarStatus::at_upper;
    }

    double nonbasic_value(int j) const {
        return status_[idx(j)] == VarStatus::at_upper ? up_[idx(j)] : lo_[idx(j)];
    }

    /// Rebuild the eta file for the basis in `desired_basic_` and recompute
    /// basic values. Columns that turn out dependent are dropped in favour of
    /// the row logicals they would have replaced.
    void reinvert() {
        const auto N = idx(total_cols());
        if (desired_basic_.size() != N) {
            desired_basic_.assign(N, 0);
            for (std::size_t j = 0; j < N; ++j) desired_basic_[j] = status_[j] == VarStatus::basic;
        }
        eta_pos_.clear();
        eta_start_.assign(1, 0);
        eta_idx_.clear();
        eta_val_.clear();
        head_.resize(idx(m_));
        where_.assign(N, -1);
        for (int r = 0; r < m_; ++r) {
            head_[idx(r)] = n_ + r;
            where_[idx(n_ + r)] = r;
        }
        std::vector<int> structurals;
        for (int j = 0; j < n_; ++j)
            if (desired_basic_[idx(j)]) structurals.push_back(j);
        std::stable_sort(structurals.begin(), structurals.end(), [&](int a, int b) {
            return col_start_[idx(a) + 1] - col_start_[idx(a)] <
                   col_start_[idx(b) + 1] - col_start_[idx(b)];
        });
        for (int q : structurals) {
            ftran_column(q);
            int best = -1;
            double best_abs = 1e-7;
            for (int r : alpha_nz_) {
                const int occupant = head_[idx(r)];
                if (!is_slack(occupant) || desired_basic_[idx(occupant)]) continue;
                if (std::abs(alpha_[idx(r)]) > best_abs) {
                    best_abs = std::abs(alpha_[idx(r)]);
                    best = r;
                }
            }
            if (best < 0) {
                desired_basic_[idx(q)] = 0;
                status_[idx(q)] = normalize_nonbasic(q, VarStatus::at_lower);
                continue;
            }
            const int out = head_[idx(best)];
            where_[idx(out)] = -1;
            push_eta(best);
            head_[idx(best)] = q;
            where_[idx(q)] = best;
        }
        for (std::size_t j = 0; j < N; ++j) {
            if (where_[j] >= 0) {
                status_[j] = VarStatus::basic;
            } else if (status_[j] == VarStatus::basic) {
                status_[j] = normalize_nonbasic(static_cast<int>(j), VarStatus::at_lower);
            }
            desired_basic_[j] = where_[j] >= 0;
        }
        factor_etas_ = eta_pos_.size();
        recompute_primal();
    }

    void recompute_primal() {
        x_.assign(idx(total_cols()), 0.0);
        std::vector<double> r(rhs_.begin(), rhs_.end());
        for (int j = 0; j < total_cols(); ++j) {
            if (where_[idx(j)] >= 0) continue;
            const double v = nonbasic_value(j);
            x_[idx(j)] = v;
            if (v == 0.0) continue;
            if (is_slack(j)) {
                r[idx(j - n_)] -= v;
            } else {
                for (int k = col_start_[idx(j)]; k < col_start_[idx(j) + 1]; ++k)
                    r[idx(col_row_[idx(k)])] -= col_val_[idx(k)] * v;
            }
        }
        ftran(r);
        for (int p = 0; p < m_; ++p) x_[idx(head_[idx(p)])] = r[idx(p)];
    }

    // ---- product-form inverse ----------------------------------------------

    void ftran(std::vector<double>& a) const {
        for (std::size_t k = 0; k < eta_pos_.size(); ++k) {
            const auto p = idx(eta_pos_[k]);
            const double t = a[p];
            if (t == 0.0) continue;
            a[p] = 0.0;
            for (int e = eta_start_[k]; e < eta_start_[k + 1]; ++e)
                a[idx(eta_idx_[idx(e)])] += eta_val_[idx(e)] * t;
        }
    }

    void btran(std::vector<double>& y) const {
        for (std::size_t k = eta_pos_.size(); k-- > 0;) {
            double s = 0.0;
            for (int e = eta_start_[k]; e < eta_start_[k + 1]; ++e)
                s += eta_val_[idx(e)] * y[idx(eta_idx_[idx(e)])];
            y[idx(eta_pos_[k])] = s;
        }
    }

    /// alpha_ = B^{-1} A_q, with its possibly nonzero positions in alpha_nz_ (sorted).
    void ftran_column(int q) {
        if (alpha_.size() != idx(m_)) {
            alpha_.assign(idx(m_), 0.0);
            alpha_mark_.assign(idx(m_), 0);
            alpha_nz_.clear();
        }
        for (int r : alpha_nz_) {
            alpha_[idx(r)] = 0.0;
            alpha_mark_[idx(r)] = 0;
        }
        alpha_nz_.clear();
        auto touch = [&](int r) {
            if (!alpha_mark_[idx(r)]) {
                alpha_mark_[idx(r)] = 1;
                alpha_nz_.push_back(r);
            }
        };
        if (is_slack(q)) {
            touch(q - n_);
            alpha_[idx(q - n_)] = 1.0;
        } else {
            for (int k = col_start_[idx(q)]; k < col_start_[idx(q) + 1]; ++k) {
                touch(col_row_[idx(k)]);
                alpha_[idx(col_row_[idx(k)])] = col_val_[idx(k)];
            }
        }
        for (std::size_t k = 0; k < eta_pos_.size(); ++k) {
            const auto p = idx(eta_pos_[k]);
            const double t = alpha_[p];
            if (t == 0.0) continue;
            alpha_[p] = 0.0;
            for (int e = eta_start_[k]; e < eta_start_[k + 1]; ++e) {
                const int i = eta_idx_[idx(e)];
                touch(i);
                alpha_[idx(i)] += eta_val_[idx(e)] * t;
            }
        }
        std::sort(alpha_nz_.begin(), alpha_nz_.end());
    }

    void push_eta(int p) {
        const double piv = alpha_[idx(p)];
        eta_pos_.push_back(p);
        for (int r : alpha_nz_) {
            const double a = alpha_[idx(r)];
            if (r == p) {
                eta_idx_.push_back(r);
                eta_val_.push_back(1.0 / piv);
            } else if (a != 0.0) {
                eta_idx_.push_back(r);
                eta_val_.push_back(-a / piv);
            }
        }
        eta_start_.push_back(static_cast<int>(eta_idx_.size()));
    }

    // ---- pricing -----------------------------------------------------------

    double phase_one_cost(int j) const {
        const double v = x_[idx(j)];
        if (v < lo_[idx(j)] - kPrimalTol) return 1.0;
        if (v > up_[idx(j)] + kPrimalTol) return -1.0;
        return 0.0;
    }

    double total_infeasibility() const {
        double s = 0.0;
        for (int p = 0; p < m_; ++p) {
            const int j = head_[idx(p)];
            const double v = x_[idx(j)];
            if (v < lo_[idx(j)] - kPrimalTol) s += lo_[idx(j)] - v;
            if (v > up_[idx(j)] + kPrimalTol) s += v - up_[idx(j)];
        }
        return s;
    }

    void compute_duals(bool phase_one) {
        phase_one_ = phase_one;
        y_.assign(idx(m_), 0.0);
        for (int p = 0; p < m_; ++p) {
            const int j = head_[idx(p)];
            y_[idx(p)] = phase_one ? phase_one_cost(j) : cost_[idx(j)];
        }
        btran(y_);
    }

    double reduced_cost(int j) const {
        if (is_slack(j)) return -y_[idx(j - n_)];
        double d = phase_one_ ? 0.0 : cost_[idx(j)];
        for (int k = col_start_[idx(j)]; k < col_start_[idx(j) + 1]; ++k)
            d -= y_[idx(col_row_[idx(k)])] * col_val_[idx(k)];
        return d;
    }

    std::pair<int, int> choose_entering(bool phase_one, bool bland) const {
        const double tol = phase_one ? 1e-9 : dual_tol();
        int best = -1;
        int best_dir = 0;
        double best_score = 0.0;
        for (int j = 0; j < total_cols(); ++j) {
            if (where_[idx(j)] >= 0) continue;
            if (lo_[idx(j)] == up_[idx(j)]) continue;
            const double d = reduced_cost(j);
            int dir = 0;
            if (status_[idx(j)] == VarStatus::at_lower && d > tol) dir = 1;
            else if (status_[idx(j)] == VarStatus::at_upper && d < -tol) dir = -1;
            if (dir == 0) continue;
            if (bland) return {j, dir};
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                best = j;
                best_dir = dir;
            }
        }
        return {best, best_dir};
    }

    Step ratio_test(int q, int dir, bool phase_one, bool bland) const {
        Step step;
        const double span = up_[idx(q)] - lo_[idx(q)];
        if (std::isfinite(span)) step.theta = span;
        double best_alpha = 0.0;
        int best_var = std::numeric_limits<int>::max();
        for (int p : alpha_nz_) {
            const double a = alpha_[idx(p)];
            if (std::abs(a) <= kPivotTol) continue;
            const int j = head_[idx(p)];
            const double g = -dir * a;  // rate of change of x_j per unit step
            const double v = x_[idx(j)];
            const double lo = lo_[idx(j)];
            const double up = up_[idx(j)];
            double t = kInf;
            VarStatus to = VarStatus::at_lower;
            if (phase_one && v < lo - kPrimalTol) {
                if (g > 0) { t = (lo - v) / g; to = VarStatus::at_lower; }
            } else if (phase_one && v > up + kPrimalTol) {
                if (g < 0) { t = (v - up) / -g; to = VarStatus::at_upper; }
            } else if (g < 0) {
                if (std::isfinite(lo)) { t = std::max(0.0, v - lo) / -g; to = VarStatus::at_lower; }
            } else {
                if (std::isfinite(up)) { t = std::max(0.0, up - v) / g; to = VarStatus::at_upper; }
            }
            if (!std::isfinite(t)) continue;
            bool take = false;
            if (t < step.theta - 1e-12) {
                take = true;
            } else if (t <= step.theta + 1e-12 && step.leave_pos >= 0) {
                take = bland ? j < best_var : std::abs(a) > best_alpha;
            } else if (t <= step.theta + 1e-12 && step.leave_pos < 0 && std::isfinite(step.theta)) {
                take = false;  // prefer the bound flip on ties
            }
            if (take) {
                step.theta = t;
                step.leave_pos = p;
                step.leave_to = to;
                best_alpha = std::abs(a);
                best_var = j;
            }
        }
        return step;
    }

    void apply_step(int q, int dir, const Step& step) {
        const double theta = step.theta;
        if (theta != 0.0) {
            x_[idx(q)] += dir * theta;
            for (int p : alpha_nz_) {
                const double a = alpha_[idx(p)];
                if (a != 0.0) x_[idx(head_[idx(p)])] -= dir * theta * a;
            }
        }
        if (step.leave_pos < 0) {
            status_[idx(q)] = dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
            x_[idx(q)] = nonbasic_value(q);
            return;
        }
        const int p = step.leave_pos;
        const int out = head_[idx(p)];
        status_[idx(out)] = step.leave_to;
        x_[idx(out)] = nonbasic_value(out);
        where_[idx(out)] = -1;
        desired_basic_[idx(out)] = 0;
        push_eta(p);
        head_[idx(p)] = q;
        where_[idx(q)] = p;
        status_[idx(q)] = VarStatus::basic;
        desired_basic_[idx(q)] = 1;
    }

    LpBasis snapshot() const {
        LpBasis b;
        b.columns.assign(status_.begin(), status_.begin() + n_);
        b.rows.assign(status_.begin() + n_, status_.end());
        return b;
    }

    int n_;
    int m_;
    std::vector<double> lo_, up_, cost_, rhs_;
    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    double max_cost_ = 1.0;

    std::vector<VarStatus> status_;
    std::vector<char> desired_basic_;
    std::vector<int> head_, where_;
    std::vector<double> x_, y_, alpha_;
    std::vector<int> alpha_nz_;
    std::vector<char> alpha_mark_;
    bool phase_one_ = false;

    std::vector<int> eta_pos_, eta_start_, eta_idx_;
    std::size_t factor_etas_ = 0;  ///< etas produced by the last refactorization
    std::vector<double> eta_val_;
};

/// Solve the LP relaxation of `model` (integrality flags are ignored).
inline LpSolution solve_lp(const LinearModel& model, const LpOptions& options = {}) {
    SimplexSolver solver(model);
    return solver.solve(options);
}

}  // namespace mzp::optim
