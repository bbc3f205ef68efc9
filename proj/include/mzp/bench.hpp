#pragma once
/// Desk-scale experiments on synthetic suites: exact vs heuristic pricing,
/// run-count sensitivity, anytime curves and heuristic run timing. Every
/// coverage figure comes from `evaluate`, never from solver internals.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mzp/oracle.hpp"
#include "mzp/report.hpp"
#include "mzp/synthetic.hpp"

namespace mzp::bench {

struct SuiteEntry {
    std::string name;
    Instance instance;
};

inline std::string spec_name(const SyntheticSpec& s) {
    return "g" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + (s.hex ? "hex" : "") + "-h" +
           std::to_string(s.hotspots) + "-s" + std::to_string(s.seed);
}

inline std::vector<SuiteEntry> synthetic_suite(const std::vector<SyntheticSpec>& specs) {
    std::vector<SuiteEntry> out;
    for (const auto& s : specs) out.push_back({spec_name(s), generate_instance(s)});
    return out;
}

inline std::string suite_digest(const std::vector<SuiteEntry>& suite) {
    std::string all;
    for (const auto& e : suite) all += e.name + ":" + instance_digest(e.instance) + "\n";
    return hex_digest(fnv1a(all));
}

/// Fifteen grids from 16 to 64 cells, alternating square and hex layouts.
inline std::vector<SyntheticSpec> comparison_specs(std::uint64_t seed = 1) {
    const std::vector<std::pair<int, int>> grids{{4, 4}, {4, 5}, {4, 6}, {5, 5}, {4, 7}, {5, 6}, {4, 8}, {6, 6},
                                                 {5, 8}, {6, 7}, {7, 7}, {6, 8}, {7, 8}, {8, 8}, {5, 7}};
    std::vector<SyntheticSpec> out;
    for (std::size_t k = 0; k < grids.size(); ++k) {
        SyntheticSpec s;
        s.rows = grids[k].first;
        s.cols = grids[k].second;
        s.hex = k % 2 == 1;
        s.hotspots = 2 + static_cast<int>(k % 3);
        s.seed = seed + k;
        out.push_back(s);
    }
    return out;
}

/// Multi-hotspot family for the run-count study.
inline std::vector<SyntheticSpec> sensitivity_specs(std::uint64_t seed = 101) {
    std::vector<SyntheticSpec> out;
    for (int k = 0; k < 3; ++k) {
        SyntheticSpec s;
        s.rows = 6;
        s.cols = 6 + k;
        s.hotspots = 3 + k;
        s.seed = seed + static_cast<std::uint64_t>(k);
        out.push_back(s);
    }
    return out;
}

struct RunOutcome {
    double coverage = 0.0;
    double covered_demand = 0.0;
    double total_cost = 0.0;
    std::string termination;
    std::size_t iterations = 0;
    std::size_t pool_size = 0;
    double seconds = 0.0;
};

inline RunOutcome solve_and_evaluate(const Instance& inst, const CgConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_cg(inst, config);
    RunOutcome o;
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto rep = evaluate(inst, r.solution.zones);
    o.coverage = rep.coverage();
    o.covered_demand = rep.covered_demand;
    o.total_cost = rep.total_cost;
    o.termination = r.trace.termination;
    o.iterations = r.trace.iterations.size();
    o.pool_size = r.pool.size();
    return o;
}

struct ComparisonRow {
    std::string name;
    int cells = 0;
    std::uint64_t seed = 0;
    RunOutcome exact;
    RunOutcome heuristic;
    std::optional<double> oracle_coverage;

    double ratio() const { return exact.coverage > 0.0 ? heuristic.coverage / exact.coverage : 1.0; }
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    double max_relative_shortfall() const {
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, 1.0 - r.ratio());
        return worst;
    }
    int count_at_least(double ratio) const {
        int c = 0;
        for (const auto& r : rows) c += r.ratio() >= ratio - 1e-12;
        return c;
    }
};

/// CG with exact pricing and with heuristic pricing under the same limits.
/// Instances within the oracle limit also get the exact zoning optimum.
inline ComparisonTable run_pricing_comparison(const std::vector<SuiteEntry>& suite,
                                              const std::vector<std::uint64_t>& seeds, const CgConfig& base,
                                              const OracleLimits& oracle = {}) {
    ComparisonTable t;
    for (const auto& e : suite)
        for (std::uint64_t seed : seeds) {
            ComparisonRow row;
            row.name = e.name;
            row.cells = e.instance.size();
            row.seed = seed;
            CgConfig c = base;
            c.seed = seed;
            c.pricing = PricingMode::exact;
            row.exact = solve_and_evaluate(e.instance, c);
            c.pricing = PricingMode::heuristic;
            row.heuristic = solve_and_evaluate(e.instance, c);
            if (e.instance.size() <= oracle.max_cells_zoning)
                row.oracle_coverage = evaluate(e.instance, oracle_optimum(e.instance, oracle).zones).coverage();
            t.rows.push_back(std::move(row));
        }
    return t;
}

struct SensitivityRow {
    std::string name;
    int cells = 0;
    std::vector<double> mean_coverage;  ///< one per R value
};

struct SensitivityTable {
    std::vector<int> runs;
    std::size_t seeds = 0;
    std::vector<SensitivityRow> rows;

    /// Mean coverage at R = `hi` is at least the mean at R = `lo` for every row.
    bool nondecreasing(int lo, int hi) const {
        const auto a = std::find(runs.begin(), runs.end(), lo) - runs.begin();
        const auto b = std::find(runs.begin(), runs.end(), hi) - runs.begin();
        if (a == static_cast<std::ptrdiff_t>(runs.size()) || b == static_cast<std::ptrdiff_t>(runs.size()))
            throw InputError("R value not in the table");
        for (const auto& r : rows)
            if (r.mean_coverage[static_cast<std::size_t>(b)] < r.mean_coverage[static_cast<std::size_t>(a)] - 1e-12)
                return false;
        return true;
    }
};

inline SensitivityTable run_r_sensitivity(const std::vector<SuiteEntry>& suite, const std::vector<int>& runs,
                                          const std::vector<std::uint64_t>& seeds, const CgConfig& base) {
    SensitivityTable t;
    t.runs = runs;
    t.seeds = seeds.size();
    for (const auto& e : suite) {
        SensitivityRow row;
        row.name = e.name;
        row.cells = e.instance.size();
        for (int r : runs) {
            double sum = 0.0;
            for (std::uint64_t seed : seeds) {
                CgConfig c = base;
                c.pricing = PricingMode::heuristic;
                c.runs = r;
                c.seed = seed;
                sum += solve_and_evaluate(e.instance, c).coverage;
            }
            row.mean_coverage.push_back(seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct AnytimePoint {
    double limit = 0.0;
    RunOutcome outcome;
};

struct AnytimeCurve {
    std::string name;
    std::vector<AnytimePoint> points;

    bool nondecreasing() const {
        for (std::size_t k = 1; k < points.size(); ++k)
            if (points[k].outcome.coverage < points[k - 1].outcome.coverage - 1e-12) return false;
        return true;
    }
};

/// One fresh solve per time limit, same seed throughout.
inline AnytimeCurve run_anytime_curve(const SuiteEntry& e, std::vector<double> limits, const CgConfig& base) {
    std::sort(limits.begin(), limits.end());
    AnytimeCurve curve;
    curve.name = e.name;
    for (double limit : limits) {
        CgConfig c = base;
        c.total_time_limit = limit;
        curve.points.push_back({limit, solve_and_evaluate(e.instance, c)});
    }
    return curve;
}

/// Duals of the master LP over the initial pool, a realistic pricing input.
inline Duals initial_duals(const Instance& inst, std::uint64_t seed) {
    CgConfig c;
    c.seed = seed;
    const auto pool = initialize_pool(inst, c);
    return solve_rmp_lp(build_rmp(pool, inst, true, seed)).duals;
}

/// Wall time of single-run heuristic pricing calls, one per seed.
inline std::vector<double> heuristic_run_times(const Instance& inst, const Duals& duals, int samples,
                                               std::uint64_t seed = 0) {
    std::vector<double> out;
    for (int s = 0; s < samples; ++s) {
        HeuristicPricingOptions ho;
        ho.runs = 1;
        ho.seed = seed + static_cast<std::uint64_t>(s);
        const auto start = std::chrono::steady_clock::now();
        const auto r = heuristic_pricing(duals, inst, ho);
        out.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        if (r.runs_attempted != 1) throw SolverError("heuristic timing: unexpected run count");
    }
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct QuadraticFit {
    double intercept = 0.0;
    double slope = 0.0;  ///< coefficient of n^2
    double r2 = 0.0;
};

/// Least squares fit of t = a + b n^2.
inline QuadraticFit fit_quadratic(const std::vector<double>& n, const std::vector<double>& t) {
    if (n.size() != t.size() || n.size() < 2) throw InputError("fit_quadratic needs at least two points");
    const double k = static_cast<double>(n.size());
    std::vector<double> x;
    for (double v : n) x.push_back(v * v);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
    const double my = std::accumulate(t.begin(), t.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (t[i] - my);
        syy += (t[i] - my) * (t[i] - my);
    }
    QuadraticFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = t[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

inline json outcome_to_json(const RunOutcome& o) {
    return {{"coverage", o.coverage},       {"covered_demand", o.covered_demand}, {"total_cost", o.total_cost},
            {"termination", o.termination}, {"iterations", o.iterations},         {"pool_size", o.pool_size},
            {"seconds", o.seconds}};
}

inline json to_json(const ComparisonTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"instance", r.name},
                        {"cells", r.cells},
                        {"seed", r.seed},
                        {"exact", outcome_to_json(r.exact)},
                        {"heuristic", outcome_to_json(r.heuristic)},
                        {"ratio", r.ratio()},
                        {"oracle_coverage", r.oracle_coverage ? json(*r.oracle_coverage) : json(nullptr)}});
    return {{"rows", rows},
            {"max_relative_shortfall", t.max_relative_shortfall()},
            {"at_least_95", t.count_at_least(0.95)},
            {"at_least_90", t.count_at_least(0.90)}};
}

inline std::string to_csv(const ComparisonTable& t) {
    std::ostringstream os;
    os.precision(10);
    os << "instance,cells,seed,exact_coverage,heuristic_coverage,ratio,oracle_coverage,exact_termination,"
          "heuristic_termination,exact_seconds,heuristic_seconds\n";
    for (const auto& r : t.rows) {
        os << r.name << ',' << r.cells << ',' << r.seed << ',' << r.exact.coverage << ',' << r.heuristic.coverage << ','
           << r.ratio() << ',';
        if (r.oracle_coverage) os << *r.oracle_coverage;
        os << ',' << r.exact.termination << ',' << r.heuristic.termination << ',' << r.exact.seconds << ','
           << r.heuristic.seconds << '\n';
    }
    return os.str();
}

inline json to_json(const SensitivityTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json cols = json::object();
        for (std::size_t k = 0; k < t.runs.size(); ++k) cols[std::to_string(t.runs[k]) + " Runs"] = r.mean_coverage[k];
        rows.push_back({{"instance", r.name}, {"cells", r.cells}, {"mean_coverage", cols}});
    }
    return {{"runs", t.runs}, {"seeds", t.seeds}, {"rows", rows}};
}

/// Instance rows, one mean-coverage column per R.
inline std::string to_csv(const SensitivityTable& t) {
    std::ostringstream os;
    os.precision(10);
    os << "instance,cells";
    for (int r : t.runs) os << ',' << r << " Runs";
    os << '\n';
    for (const auto& r : t.rows) {
        os << r.name << ',' << r.cells;
        for (double v : r.mean_coverage) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

inline json to_json(const AnytimeCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points) {
        json j = outcome_to_json(p.outcome);
        j["limit"] = p.limit;
        pts.push_back(j);
    }
    return {{"instance", c.name}, {"points", pts}, {"nondecreasing", c.nondecreasing()}};
}

inline std::string to_csv(const AnytimeCurve& c) {
    std::ostringstream os;
    os.precision(10);
    os << "instance,limit,coverage,iterations,pool_size,termination,seconds\n";
    for (const auto& p : c.points)
        os << c.name << ',' << p.limit << ',' << p.outcome.coverage << ',' << p.outcome.iterations << ','
           << p.outcome.pool_size << ',' << p.outcome.termination << ',' << p.outcome.seconds << '\n';
    return os.str();
}

/// Writes <dir>/<suite digest>/<stem>.csv and .json; returns the directory.
inline std::string write_results(const std::string& dir, const std::string& digest, const std::string& stem,
                                 const std::string& csv, const json& doc) {
    const auto out = std::filesystem::path(dir) / digest;
    std::filesystem::create_directories(out);
    write_text((out / (stem + ".csv")).string(), csv);
    write_text((out / (stem + ".json")).string(), doc.dump(2) + "\n");
    return out.string();
}

}  // namespace mzp::bench
