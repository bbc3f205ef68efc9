#pragma once
/// The mzp subcommands as plain functions over option structs. Argument
/// parsing lives in tools/mzp.cpp.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mzp/bench.hpp"
#include "mzp/oracle.hpp"
#include "mzp/report.hpp"
#include "mzp/synthetic.hpp"

namespace mzp::cmd {

/// Cost parameters given on the command line; unset fields keep the
/// instance's (or the built-in) values.
struct ParamOverrides {
    std::optional<double> alpha, beta, budget, zone_budget;
    std::optional<bool> self_pairs;

    CostParams apply(CostParams p) const {
        if (alpha) p.alpha = *alpha;
        if (beta) p.beta = *beta;
        if (budget) p.budget = *budget;
        if (zone_budget) p.zone_budget = *zone_budget;
        if (self_pairs) p.include_self_pairs = *self_pairs;
        return p;
    }
};

struct IngestOptions {
    std::string trips, nodes, edges, cells;
    std::optional<std::string> boundary;
    std::string out = "instance.json";
    double min_trip_m = 500.0;
    int threads = 0;
    std::string cache_dir;
    ParamOverrides params;
};

struct IngestSummary {
    std::size_t trips_read = 0;
    std::size_t trips_kept = 0;
    double demand_total = 0.0;
    std::string digest;
};

inline IngestSummary ingest(const IngestOptions& o, std::ostream& log = std::cerr) {
    IngestSummary s;
    const auto trips = parse_trips(csv::read_file(o.trips));
    s.trips_read = trips.size();
    Instance inst;
    inst.cells = parse_cells(csv::read_file(o.cells));
    const auto network = parse_network(csv::read_file(o.nodes), csv::read_file(o.edges));

    std::optional<geo::Region> region;
    if (o.boundary) {
        const json doc = read_json_file(*o.boundary);
        try {
            inst.boundary = boundary_geometry(doc);
            region = parse_region(*inst.boundary);
        } catch (const InputError& e) {
            throw ParseError(*o.boundary + ": " + e.what());
        }
    }
    const auto kept = filter_trips(trips, region ? &*region : nullptr, o.min_trip_m);
    s.trips_kept = kept.size();
    inst.demand = assign_to_cells(kept, inst.cells);
    s.demand_total = inst.demand.total();
    if (kept.empty()) log << "warning: no trips survive filtering (" << trips.size() << " read); demand is empty\n";

    const auto nodes = map_cells_to_nodes(inst.cells, network);
    for (std::size_t k = 0; k < nodes.size(); ++k) inst.cells[k].network_node = nodes[k];
    const auto raw = o.cache_dir.empty() ? shortest_path_matrix(network, nodes, o.threads)
                                         : cached_shortest_path_matrix(network, nodes, o.cache_dir);
    inst.distances = normalize(inst.size(), raw);
    inst.params = o.params.apply(CostParams{});
    inst.provenance = {{"generator", "ingest"},
                       {"trips", file_digest(o.trips)},
                       {"nodes", file_digest(o.nodes)},
                       {"edges", file_digest(o.edges)},
                       {"cells", file_digest(o.cells)},
                       {"boundary", o.boundary ? json(file_digest(*o.boundary)) : json(nullptr)},
                       {"min_trip_m", o.min_trip_m},
                       {"trips_read", s.trips_read},
                       {"trips_kept", s.trips_kept}};
    inst.validate();
    save_instance(inst, o.out);
    s.digest = instance_digest(inst);
    return s;
}

struct GenerateOptions {
    SyntheticSpec spec;
    std::string out = "instance.json";
    ParamOverrides params;
};

inline std::string gen_synthetic(GenerateOptions o) {
    o.spec.params = o.params.apply(o.spec.params);
    const auto inst = generate_instance(o.spec);
    save_instance(inst, o.out);
    return instance_digest(inst);
}

struct SolveOptions {
    std::string instance;
    std::string out_dir = ".";
    ParamOverrides params;
    CgConfig config;
    bool deterministic = false;
};

/// Deterministic mode keeps only limits that do not depend on the clock: a
/// zero CG limit still means "initial pool only", every other wall-clock
/// limit is lifted.
inline CgConfig deterministic_config(CgConfig c) {
    if (c.total_time_limit != 0.0) c.total_time_limit = kInf;
    c.pricing_time_limit = kInf;
    c.final_time_limit = kInf;
    return c;
}

struct SolveOutputs {
    CgResult result;
    EvaluationReport report;
    std::string solution_path, trace_path, geojson_path;
};

inline SolveOutputs solve(const SolveOptions& o) {
    Instance inst = load_instance(o.instance);
    inst.params = o.params.apply(inst.params);
    if (inst.params.enforce_zone_budget && inst.params.zone_budget < inst.params.beta)
        throw InfeasibleError("single-zone budget B0 = " + std::to_string(inst.params.zone_budget) +
                              " is below the fixed zone cost beta = " + std::to_string(inst.params.beta) +
                              "; no zone is affordable");
    inst.validate();
    const CgConfig config = o.deterministic ? deterministic_config(o.config) : o.config;
    SolveOutputs out;
    out.result = run_cg(inst, config);
    out.report = evaluate(inst, out.result.solution.zones);
    if (out.report.covered_demand != out.result.solution.covered_demand)
        throw SolverError("solver coverage " + std::to_string(out.result.solution.covered_demand) +
                          " disagrees with evaluation " + std::to_string(out.report.covered_demand));
    std::filesystem::create_directories(o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    out.solution_path = (dir / "solution.json").string();
    out.trace_path = (dir / "trace.jsonl").string();
    out.geojson_path = (dir / "zones.geojson").string();
    write_text(out.solution_path, solution_to_json(out.result, inst, config).dump(2) + "\n");
    write_text(out.trace_path, trace_to_jsonl(out.result.trace, !o.deterministic));
    write_text(out.geojson_path, zones_geojson(inst, out.result.solution.zones).dump(2) + "\n");
    return out;
}

struct OracleOptions {
    std::string instance;
    std::string out = "oracle.json";
    ParamOverrides params;
    OracleLimits limits;
};

inline Solution oracle(const OracleOptions& o) {
    Instance inst = load_instance(o.instance);
    inst.params = o.params.apply(inst.params);
    inst.validate();
    const Solution s = oracle_optimum(inst, o.limits);
    write_text(o.out, oracle_solution_to_json(s, inst).dump(2) + "\n");
    return s;
}

struct EvaluateOptions {
    std::string instance;
    std::string solution;
    double adjacency_radius_m = -1.0;
    ParamOverrides params;
};

inline EvaluationReport evaluate_files(const EvaluateOptions& o) {
    Instance inst = load_instance(o.instance);
    inst.params = o.params.apply(inst.params);
    inst.validate();
    return evaluate(inst, solution_zone_cells(read_json_file(o.solution)), o.adjacency_radius_m);
}

struct BenchOptions {
    std::string experiment = "compare";  ///< compare | sensitivity | anytime | timing
    std::string results_dir = "results";
    CgConfig config;
    int seeds = 1;
    std::uint64_t suite_seed = 1;
    std::vector<int> runs{1, 5, 10};
    std::vector<double> limits{0.0, 0.05, 0.3, 2.0};
    int samples = 50;
};

inline std::vector<std::uint64_t> seed_list(int count) {
    std::vector<std::uint64_t> s;
    for (int k = 0; k < count; ++k) s.push_back(static_cast<std::uint64_t>(k));
    return s;
}

/// Runs one experiment, writes its CSV and JSON, and returns the JSON.
inline json bench(const BenchOptions& o, std::ostream& log = std::cerr) {
    using namespace mzp::bench;
    if (o.seeds < 1) throw InputError("bench: seeds must be >= 1");
    if (o.experiment == "compare") {
        const auto suite = synthetic_suite(comparison_specs(o.suite_seed));
        const auto t = run_pricing_comparison(suite, seed_list(o.seeds), o.config);
        const auto doc = to_json(t);
        log << "results: " << write_results(o.results_dir, suite_digest(suite), "pricing_comparison", to_csv(t), doc) << "\n";
        return doc;
    }
    if (o.experiment == "sensitivity") {
        const auto suite = synthetic_suite(sensitivity_specs(o.suite_seed + 100));
        const auto t = run_r_sensitivity(suite, o.runs, seed_list(o.seeds), o.config);
        const auto doc = to_json(t);
        log << "results: " << write_results(o.results_dir, suite_digest(suite), "r_sensitivity", to_csv(t), doc) << "\n";
        return doc;
    }
    if (o.experiment == "anytime") {
        const auto suite = synthetic_suite(comparison_specs(o.suite_seed));
        json doc = json::array();
        std::string csv;
        for (const auto& e : suite) {
            const auto c = run_anytime_curve(e, o.limits, o.config);
            doc.push_back(to_json(c));
            const auto part = to_csv(c);
            csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
        }
        log << "results: " << write_results(o.results_dir, suite_digest(suite), "anytime", csv, doc) << "\n";
        return doc;
    }
    if (o.experiment == "timing") {
        std::vector<SyntheticSpec> specs(3);
        specs[0].rows = 4, specs[0].cols = 8;
        specs[1].rows = 8, specs[1].cols = 8;
        specs[2].rows = 8, specs[2].cols = 16;
        for (auto& s : specs) s.seed = o.suite_seed;
        const auto suite = synthetic_suite(specs);
        std::vector<double> ns, med;
        json rows = json::array();
        std::string csv = "instance,cells,median_seconds,samples\n";
        for (const auto& e : suite) {
            const auto times = heuristic_run_times(e.instance, initial_duals(e.instance, o.suite_seed), o.samples);
            ns.push_back(e.instance.size());
            med.push_back(median(times));
            rows.push_back({{"instance", e.name}, {"cells", e.instance.size()}, {"median_seconds", med.back()},
                            {"samples", times.size()}});
            csv += e.name + "," + std::to_string(e.instance.size()) + "," + std::to_string(med.back()) + "," +
                   std::to_string(times.size()) + "\n";
        }
        const auto fit = fit_quadratic(ns, med);
        json doc{{"rows", rows}, {"fit", {{"intercept", fit.intercept}, {"slope", fit.slope}, {"r2", fit.r2}}}};
        log << "results: " << write_results(o.results_dir, suite_digest(suite), "heuristic_timing", csv, doc) << "\n";
        return doc;
    }
    throw InputError("bench: unknown experiment '" + o.experiment + "' (compare, sensitivity, anytime, timing)");
}

}  // namespace mzp::cmd
