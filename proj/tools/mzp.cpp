#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "mzp/cli_args.hpp"
#include "mzp/commands.hpp"

using namespace mzp;

namespace {

enum Exit { ok = 0, failure = 1, bad_input = 2, infeasible = 3, guarded = 4 };

std::vector<cli::FlagSpec> value_flags(std::initializer_list<const char*> names) {
    std::vector<cli::FlagSpec> out;
    for (const char* n : names) out.push_back({n, false, ""});
    return out;
}

const std::vector<cli::FlagSpec>& param_flags() {
    static const std::vector<cli::FlagSpec> f = [] {
        auto v = value_flags({"alpha", "beta", "budget", "zone-budget"});
        v.push_back({"self-pairs", true, "no-self-pairs"});
        return v;
    }();
    return f;
}

/// Flags that may come from MZP_* variables or the config file, per subcommand.
std::vector<cli::FlagSpec> flags_for(const std::string& sub) {
    std::vector<cli::FlagSpec> f;
    auto add = [&](const std::vector<cli::FlagSpec>& more) { f.insert(f.end(), more.begin(), more.end()); };
    if (sub == "ingest") {
        add(value_flags({"trips", "nodes", "edges", "cells", "boundary", "out", "min-trip-m", "threads", "cache-dir"}));
        add(param_flags());
    } else if (sub == "gen-synthetic") {
        add(value_flags({"rows", "cols", "hotspots", "intensity", "decay-radius", "gravity-length", "demand-scale",
                         "density", "spacing-m", "speed-mps", "speed-jitter", "seed", "out"}));
        f.push_back({"hex", true, "square"});
        add(param_flags());
    } else if (sub == "solve") {
        add(value_flags({"instance", "out-dir", "runs", "seed", "pricing", "time-limit", "pricing-time-limit",
                         "final-time-limit", "max-iterations"}));
        f.push_back({"perturb", true, "no-perturb"});
        f.push_back({"deterministic", true, ""});
        add(param_flags());
    } else if (sub == "oracle") {
        add(value_flags({"instance", "out", "max-cells"}));
        add(param_flags());
    } else if (sub == "evaluate") {
        add(value_flags({"instance", "solution", "adjacency-radius-m", "out"}));
        add(param_flags());
    } else if (sub == "bench") {
        add(value_flags({"results-dir", "seeds", "suite-seed", "time-limit", "pricing-time-limit", "final-time-limit",
                         "runs", "samples", "pricing"}));
    }
    return f;
}

void add_param_options(CLI::App* app, cmd::ParamOverrides& p) {
    app->add_option("--alpha", p.alpha, "Diameter cost weight alpha (default 5)");
    app->add_option("--beta", p.beta, "Fixed cost per zone beta (default 1)");
    app->add_option("--budget", p.budget, "Global budget B (default 8)");
    app->add_option("--zone-budget", p.zone_budget, "Single-zone budget B0 (default 2)");
    auto* on = app->add_flag_callback("--self-pairs", [&p] { p.self_pairs = true; }, "Count demand with origin and destination in one cell");
    auto* off = app->add_flag_callback("--no-self-pairs", [&p] { p.self_pairs = false; }, "Ignore same-cell demand (default)");
    on->excludes(off);
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    CLI::App app{"Micro-transit zoning by column generation", "mzp"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_file;
    app.add_option("--config", config_file, "JSON file of flag defaults (also MZP_CONFIG)");

    // ingest
    cmd::IngestOptions ing;
    auto* c_ingest = app.add_subcommand("ingest", "Build an instance from trips, a road network and cells");
    c_ingest->add_option("--trips", ing.trips, "Trip CSV (origin_lat, origin_lon, dest_lat, dest_lon[, count])")->required();
    c_ingest->add_option("--nodes", ing.nodes, "Road node CSV (id, lat, lon)")->required();
    c_ingest->add_option("--edges", ing.edges, "Road edge CSV (from, to, travel_time_s)")->required();
    c_ingest->add_option("--cells", ing.cells, "Cell CSV (id, lat, lon[, tag])")->required();
    c_ingest->add_option("--boundary", ing.boundary, "GeoJSON service-area boundary");
    c_ingest->add_option("--out,-o", ing.out, "Instance file to write")->capture_default_str();
    c_ingest->add_option("--min-trip-m", ing.min_trip_m, "Drop trips shorter than this (meters)")->capture_default_str();
    c_ingest->add_option("--threads", ing.threads, "Shortest-path worker threads (0: hardware)")->capture_default_str();
    c_ingest->add_option("--cache-dir", ing.cache_dir, "Directory for cached distance matrices");
    add_param_options(c_ingest, ing.params);

    // gen-synthetic
    cmd::GenerateOptions gen;
    auto* c_gen = app.add_subcommand("gen-synthetic", "Generate a synthetic grid instance");
    auto& sp = gen.spec;
    c_gen->add_option("--rows", sp.rows, "Grid rows")->capture_default_str();
    c_gen->add_option("--cols", sp.cols, "Grid columns")->capture_default_str();
    auto* hex = c_gen->add_flag("--hex", sp.hex, "Hex-offset layout");
    auto* square = c_gen->add_flag_callback("--square", [&sp] { sp.hex = false; }, "Square layout (default)");
    hex->excludes(square);
    c_gen->add_option("--hotspots", sp.hotspots, "Demand hotspots")->capture_default_str();
    c_gen->add_option("--intensity", sp.intensity, "Hotspot peak attraction")->capture_default_str();
    c_gen->add_option("--decay-radius", sp.decay_radius, "Hotspot spread (cell spacings)")->capture_default_str();
    c_gen->add_option("--gravity-length", sp.gravity_length, "Trip-length decay (cell spacings)")->capture_default_str();
    c_gen->add_option("--demand-scale", sp.demand_scale, "Demand multiplier")->capture_default_str();
    c_gen->add_option("--density", sp.density, "Share of OD pairs with demand")->capture_default_str();
    c_gen->add_option("--spacing-m", sp.spacing_m, "Cell spacing (meters)")->capture_default_str();
    c_gen->add_option("--speed-mps", sp.speed_mps, "Mean road speed (m/s)")->capture_default_str();
    c_gen->add_option("--speed-jitter", sp.speed_jitter, "Relative per-edge speed jitter")->capture_default_str();
    c_gen->add_option("--seed", sp.seed, "Generator seed")->capture_default_str();
    c_gen->add_option("--out,-o", gen.out, "Instance file to write")->capture_default_str();
    add_param_options(c_gen, gen.params);

    // solve
    cmd::SolveOptions sol;
    std::string pricing = "heuristic";
    double time_limit = kInf, pricing_limit = kInf;
    auto* c_solve = app.add_subcommand("solve", "Column generation, then the integer master");
    c_solve->add_option("--instance,-i", sol.instance, "Instance file")->required();
    c_solve->add_option("--out-dir,-o", sol.out_dir, "Directory for solution.json, trace.jsonl, zones.geojson")
        ->capture_default_str();
    c_solve->add_option("--runs", sol.config.runs, "Heuristic runs per pricing round (R)")->capture_default_str();
    c_solve->add_option("--seed", sol.config.seed, "Random seed")->capture_default_str();
    c_solve->add_option("--pricing", pricing, "Pricing mode")
        ->check(CLI::IsMember({"exact", "heuristic", "hybrid"}))
        ->capture_default_str();
    c_solve->add_option("--time-limit", time_limit, "Column generation limit in seconds (default none)");
    c_solve->add_option("--pricing-time-limit", pricing_limit, "Limit per pricing call in seconds (default none)");
    c_solve->add_option("--final-time-limit", sol.config.final_time_limit, "Integer master limit in seconds")
        ->capture_default_str();
    c_solve->add_option("--max-iterations", sol.config.max_iterations, "Column generation iteration cap")
        ->capture_default_str();
    auto* perturb = c_solve->add_flag_callback("--perturb", [&sol] { sol.config.perturb = true; },
                                               "Randomly relax linking rows against degeneracy (default)");
    auto* no_perturb = c_solve->add_flag_callback("--no-perturb", [&sol] { sol.config.perturb = false; },
                                                  "Solve the master LP unperturbed");
    perturb->excludes(no_perturb);
    c_solve->add_flag("--deterministic", sol.deterministic,
                      "Ignore wall-clock limits (except --time-limit 0) and omit timings, for byte-identical replays");
    add_param_options(c_solve, sol.params);

    // oracle
    cmd::OracleOptions orc;
    auto* c_oracle = app.add_subcommand("oracle", "Exact optimum by enumeration (small instances only)");
    c_oracle->add_option("--instance,-i", orc.instance, "Instance file")->required();
    c_oracle->add_option("--out,-o", orc.out, "Solution file to write")->capture_default_str();
    c_oracle->add_option("--max-cells", orc.limits.max_cells_zoning, "Refuse larger instances")->capture_default_str();
    add_param_options(c_oracle, orc.params);

    // evaluate
    cmd::EvaluateOptions ev;
    std::string ev_out;
    auto* c_eval = app.add_subcommand("evaluate", "Recompute coverage, cost, connectivity and overlap of a solution");
    c_eval->add_option("--instance,-i", ev.instance, "Instance file")->required();
    c_eval->add_option("--solution,-s", ev.solution, "Solution file")->required();
    c_eval->add_option("--adjacency-radius-m", ev.adjacency_radius_m,
                       "Cells closer than this are adjacent (default 1.5x median neighbour spacing)");
    c_eval->add_option("--out,-o", ev_out, "Also write the report here");
    add_param_options(c_eval, ev.params);

    // bench
    cmd::BenchOptions bo;
    std::string bench_pricing = "heuristic";
    double bench_limit = 10.0, bench_pricing_limit = kInf;
    auto* c_bench = app.add_subcommand("bench", "Synthetic-suite experiments");
    c_bench->add_option("experiment", bo.experiment, "compare | sensitivity | anytime | timing")
        ->check(CLI::IsMember({"compare", "sensitivity", "anytime", "timing"}))
        ->required();
    c_bench->add_option("--results-dir", bo.results_dir, "Results root")->capture_default_str();
    c_bench->add_option("--seeds", bo.seeds, "Seeds per instance")->capture_default_str();
    c_bench->add_option("--suite-seed", bo.suite_seed, "Suite generator seed")->capture_default_str();
    c_bench->add_option("--time-limit", bench_limit, "Column generation limit per solve")->capture_default_str();
    c_bench->add_option("--pricing-time-limit", bench_pricing_limit, "Limit per pricing call");
    c_bench->add_option("--final-time-limit", bo.config.final_time_limit, "Integer master limit")->capture_default_str();
    c_bench->add_option("--runs", bo.runs, "R values for the sensitivity study")->delimiter(',');
    c_bench->add_option("--limits", bo.limits, "Time limits for the anytime curve")->delimiter(',');
    c_bench->add_option("--samples", bo.samples, "Timed runs per size")->capture_default_str();
    c_bench->add_option("--pricing", bench_pricing, "Pricing mode for sensitivity and anytime")
        ->check(CLI::IsMember({"exact", "heuristic", "hybrid"}))
        ->capture_default_str();

    try {
        if (!args.empty() && args.front().front() != '-') {
            // keep the subcommand first; flags from env or config go after it
            const std::string sub = args.front();
            std::vector<std::string> rest(args.begin() + 1, args.end());
            rest = cli::resolve(rest, flags_for(sub), cli::load_config(cli::config_path(args)));
            rest.insert(rest.begin(), sub);
            args = rest;
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    }

    try {
        if (c_ingest->parsed()) {
            const auto s = cmd::ingest(ing);
            print_json({{"instance", ing.out},
                        {"digest", s.digest},
                        {"trips_read", s.trips_read},
                        {"trips_kept", s.trips_kept},
                        {"demand_total", s.demand_total}});
        } else if (c_gen->parsed()) {
            print_json({{"instance", gen.out}, {"digest", cmd::gen_synthetic(gen)}});
        } else if (c_solve->parsed()) {
            sol.config.pricing = parse_pricing_mode(pricing);
            sol.config.total_time_limit = time_limit;
            sol.config.pricing_time_limit = pricing_limit;
            const auto out = cmd::solve(sol);
            const auto& s = out.result.solution;
            std::cerr << "coverage " << 100.0 * out.report.coverage() << "% (" << s.covered_demand << " of "
                      << s.countable_demand << "), " << s.zones.size() << " zones, cost " << s.total_cost << " of "
                      << out.report.budget << ", " << out.result.trace.iterations.size() << " iterations, "
                      << out.result.trace.termination << "\n";
            print_json({{"solution", out.solution_path},
                        {"trace", out.trace_path},
                        {"zones", out.geojson_path},
                        {"coverage", out.report.coverage()},
                        {"termination", out.result.trace.termination}});
        } else if (c_oracle->parsed()) {
            const auto s = cmd::oracle(orc);
            print_json({{"solution", orc.out}, {"coverage", s.coverage()}, {"covered_demand", s.covered_demand}});
        } else if (c_eval->parsed()) {
            const auto doc = report_to_json(cmd::evaluate_files(ev));
            if (!ev_out.empty()) write_text(ev_out, doc.dump(2) + "\n");
            print_json(doc);
        } else if (c_bench->parsed()) {
            bo.config.pricing = parse_pricing_mode(bench_pricing);
            bo.config.total_time_limit = bench_limit;
            bo.config.pricing_time_limit = bench_pricing_limit;
            print_json(cmd::bench(bo));
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const GuardError& e) {
        std::cerr << "too large: " << e.what() << "\n";
        return guarded;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return ok;
}
