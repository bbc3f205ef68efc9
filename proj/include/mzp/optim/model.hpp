#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "mzp/errors.hpp"
#include "mzp/util.hpp"

namespace mzp::optim {

/// Centralized solver tolerances.
struct Tolerances {
    static constexpr double feasibility = 1e-7;
    static constexpr double integrality = 1e-6;
    static constexpr double mip_gap = 1e-6;
};

enum class RowSense { le, eq, ge };

struct Variable {
    double lower = 0.0;
    double upper = 1.0;
    double objective = 0.0;
    bool integer = false;
};

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Row {
    std::vector<Term> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

/// A maximization LP/MIP over bounded variables.
class LinearModel {
public:
    int add_variable(double lower, double upper, double objective, bool integer = false) {
        vars_.push_back({lower, upper, objective, integer});
        return static_cast<int>(vars_.size()) - 1;
    }

    int add_row(std::vector<Term> terms, RowSense sense, double rhs) {
        rows_.push_back({std::move(terms), sense, rhs});
        return static_cast<int>(rows_.size()) - 1;
    }

    void set_objective(int var, double c) { vars_[static_cast<std::size_t>(var)].objective = c; }
    void set_bounds(int var, double lower, double upper) {
        auto& v = vars_[static_cast<std::size_t>(var)];
        v.lower = lower;
        v.upper = upper;
    }
    void add_term(int row, int var, double coef) {
        rows_[static_cast<std::size_t>(row)].terms.push_back({var, coef});
    }
    void set_rhs(int row, double rhs) { rows_[static_cast<std::size_t>(row)].rhs = rhs; }

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const Variable& variable(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    const Row& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }

    void validate() const {
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            const auto& v = vars_[j];
            if (!std::isfinite(v.lower) || !std::isfinite(v.upper) || v.lower > v.upper ||
                !std::isfinite(v.objective))
                throw InputError("variable " + std::to_string(j) + ": bounds must be finite and ordered");
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (!std::isfinite(rows_[r].rhs))
                throw InputError("row " + std::to_string(r) + ": non-finite rhs");
            for (const auto& t : rows_[r].terms)
                if (t.var < 0 || t.var >= num_variables() || !std::isfinite(t.coef))
                    throw InputError("row " + std::to_string(r) + ": bad term");
        }
    }

    /// Row activity of a candidate point.
    double activity(int r, const std::vector<double>& x) const {
        double s = 0.0;
        for (const auto& t : rows_[static_cast<std::size_t>(r)].terms)
            s += t.coef * x[static_cast<std::size_t>(t.var)];
        return s;
    }

    double objective_value(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) s += vars_[j].objective * x[j];
        return s;
    }

    /// Largest bound or row violation of `x`.
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            worst = std::max(worst, vars_[j].lower - x[j]);
            worst = std::max(worst, x[j] - vars_[j].upper);
        }
        for (int r = 0; r < num_rows(); ++r) {
            const double a = activity(r, x);
            const auto& row = rows_[static_cast<std::size_t>(r)];
            if (row.sense != RowSense::ge) worst = std::max(worst, a - row.rhs);
            if (row.sense != RowSense::le) worst = std::max(worst, row.rhs - a);
        }
        return worst;
    }

    /// Plain-text dump in CPLEX LP style, for debugging.
    std::string to_lp_string() const {
        std::ostringstream os;
        os.precision(17);
        auto name = [](int j) { return "v" + std::to_string(j); };
        os << "Maximize\n obj:";
        for (int j = 0; j < num_variables(); ++j)
            if (vars_[static_cast<std::size_t>(j)].objective != 0.0)
                os << " + " << vars_[static_cast<std::size_t>(j)].objective << " " << name(j);
        os << "\nSubject To\n";
        for (int r = 0; r < num_rows(); ++r) {
            const auto& row = rows_[static_cast<std::size_t>(r)];
            os << " r" << r << ":";
            for (const auto& t : row.terms) os << " + " << t.coef << " " << name(t.var);
            os << (row.sense == RowSense::le ? " <= " : row.sense == RowSense::ge ? " >= " : " = ")
               << row.rhs << "\n";
        }
        os << "Bounds\n";
        for (int j = 0; j < num_variables(); ++j) {
            const auto& v = vars_[static_cast<std::size_t>(j)];
            os << " " << v.lower << " <= " << name(j) << " <= " << v.upper << "\n";
        }
        os << "Binaries\n";
        for (int j = 0; j < num_variables(); ++j)
            if (vars_[static_cast<std::size_t>(j)].integer) os << " " << name(j) << "\n";
        os << "End\n";
        return os.str();
    }

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
};

}  // namespace mzp::optim
