#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mzp/cli_args.hpp"
#include "mzp/commands.hpp"
#include "support/fixtures.hpp"

using namespace mzp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mzp-test-" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Writes trips/nodes/edges/cells CSVs for a synthetic city; trip ends are
/// jittered around cell centroids.
cmd::IngestOptions write_city(const TempDir& dir, int rows, int cols, int trips, double min_len_m = 0.0) {
    SyntheticSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    const auto world = generate_world(spec);
    std::ostringstream nodes, edges, cells, tcsv;
    nodes.precision(12);
    cells.precision(12);
    tcsv.precision(12);
    nodes << "id,lat,lon\n";
    for (const auto& n : world.network.nodes) nodes << n.id << ',' << n.position.lat << ',' << n.position.lon << '\n';
    edges << "from,to,travel_time_s\n";
    for (const auto& e : world.network.edges)
        edges << world.network.nodes[static_cast<std::size_t>(e.from)].id << ','
              << world.network.nodes[static_cast<std::size_t>(e.to)].id << ',' << e.weight << '\n';
    cells << "id,lat,lon,tag\n";
    for (const auto& c : world.cells) cells << c.id << ',' << c.centroid.lat << ',' << c.centroid.lon << ",c" << c.id << '\n';
    tcsv << "origin_lat,origin_lon,dest_lat,dest_lon,count\n";
    Rng rng(5);
    const int n = spec.size();
    for (int t = 0; t < trips; ++t) {
        const auto a = world.cells[uniform_index(rng, static_cast<std::uint64_t>(n))].centroid;
        auto b = world.cells[uniform_index(rng, static_cast<std::uint64_t>(n))].centroid;
        if (min_len_m > 0.0) b = geo::offset_m(a, min_len_m * uniform_unit(rng) * 0.5, 0.0);
        const auto oa = geo::offset_m(a, uniform_real(rng, -50, 50), uniform_real(rng, -50, 50));
        tcsv << oa.lat << ',' << oa.lon << ',' << b.lat << ',' << b.lon << ',' << 1 + uniform_index(rng, 3) << '\n';
    }
    spit(dir.file("nodes.csv"), nodes.str());
    spit(dir.file("edges.csv"), edges.str());
    spit(dir.file("cells.csv"), cells.str());
    spit(dir.file("trips.csv"), tcsv.str());
    cmd::IngestOptions o;
    o.trips = dir.file("trips.csv");
    o.nodes = dir.file("nodes.csv");
    o.edges = dir.file("edges.csv");
    o.cells = dir.file("cells.csv");
    o.out = dir.file("instance.json");
    o.threads = 2;
    return o;
}

cli::EnvLookup fake_env(std::map<std::string, std::string> vars) {
    return [vars](const std::string& k) -> std::optional<std::string> {
        auto it = vars.find(k);
        return it == vars.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
}

const std::vector<cli::FlagSpec> kFlags{{"alpha", false, ""}, {"runs", false, ""}, {"perturb", true, "no-perturb"}};

}  // namespace

TEST(CliArgs, FlagBeatsEnvBeatsConfig) {
    const json config{{"alpha", 7}, {"runs", 3}, {"perturb", false}};
    const auto env = fake_env({{"MZP_ALPHA", "6"}});
    const auto out = cli::resolve({"--alpha", "9"}, kFlags, config, env);
    EXPECT_EQ(out, (std::vector<std::string>{"--alpha", "9", "--runs", "3", "--no-perturb"}));
    const auto out2 = cli::resolve({}, kFlags, config, env);
    EXPECT_EQ(out2, (std::vector<std::string>{"--alpha", "6", "--runs", "3", "--no-perturb"}));
}

TEST(CliArgs, DefaultsWhenNothingGiven) {
    EXPECT_TRUE(cli::resolve({}, kFlags, json::object(), fake_env({})).empty());
}

TEST(CliArgs, NegatedSpellingCountsAsGiven) {
    const auto out = cli::resolve({"--no-perturb"}, kFlags, json::object(), fake_env({{"MZP_PERTURB", "1"}}));
    EXPECT_EQ(out, (std::vector<std::string>{"--no-perturb"}));
    const auto eq = cli::resolve({"--runs=4"}, kFlags, json{{"runs", 8}}, fake_env({}));
    EXPECT_EQ(eq, (std::vector<std::string>{"--runs=4"}));
}

TEST(CliArgs, UnderscoreConfigKeysAndBadBooleans) {
    const std::vector<cli::FlagSpec> f{{"zone-budget", false, ""}, {"perturb", true, "no-perturb"}};
    EXPECT_EQ(cli::resolve({}, f, json{{"zone_budget", 2.5}}, fake_env({})),
              (std::vector<std::string>{"--zone-budget", "2.5"}));
    EXPECT_THROW(cli::resolve({}, f, json::object(), fake_env({{"MZP_PERTURB", "maybe"}})), InputError);
    EXPECT_EQ(f[0].env(), "MZP_ZONE_BUDGET");
}

TEST(CliArgs, ConfigPathFromFlagOrEnv) {
    EXPECT_EQ(cli::config_path({"--config", "a.json"}, fake_env({})), "a.json");
    EXPECT_EQ(cli::config_path({"--config=b.json"}, fake_env({})), "b.json");
    EXPECT_EQ(cli::config_path({}, fake_env({{"MZP_CONFIG", "c.json"}})), "c.json");
    EXPECT_FALSE(cli::config_path({}, fake_env({})));
}

TEST(Evaluate, EmptySolutionCoversNothing) {
    const auto inst = mzp::testing::grid_instance(3, 3, 1);
    const auto r = evaluate(inst, std::vector<std::vector<CellId>>{});
    EXPECT_EQ(r.coverage(), 0.0);
    EXPECT_EQ(r.total_cost, 0.0);
    EXPECT_TRUE(r.within_budget());
}

TEST(Evaluate, FullCoverSingleZone) {
    auto inst = mzp::testing::grid_instance(3, 3, 1);
    inst.params.enforce_zone_budget = false;
    const auto r = evaluate(inst, {{0, 1, 2, 3, 4, 5, 6, 7, 8}});
    EXPECT_DOUBLE_EQ(r.coverage(), 1.0);
    EXPECT_TRUE(r.zones[0].connected());
}

TEST(Evaluate, DanglingCellIdIsValidationError) {
    const auto inst = mzp::testing::grid_instance(3, 3, 1);
    EXPECT_THROW(evaluate(inst, {{0, 9}}), ValidationError);
    EXPECT_THROW(evaluate(inst, std::vector<std::vector<CellId>>{{}}), ValidationError);
}

TEST(Evaluate, ConnectivityAndOverlap) {
    const auto inst = mzp::testing::grid_instance(3, 3, 1);
    // 0 and 8 are opposite corners of the grid
    const auto r = evaluate(inst, {{0, 8}, {0, 1}, {1, 2}});
    EXPECT_EQ(r.zones[0].components, 2);
    EXPECT_TRUE(r.zones[1].connected());
    EXPECT_EQ(r.overlap.shared_cells, 2);
    EXPECT_EQ(r.overlap.max_multiplicity, 2);
    EXPECT_EQ(r.overlap.overlapping_zone_pairs, 2);
}

TEST(Evaluate, MatchesSolverOnRandomInstances) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto inst = mzp::testing::grid_instance(4, 4, seed);
        CgConfig c;
        c.seed = seed;
        const auto r = run_cg(inst, c);
        const auto rep = evaluate(inst, r.solution.zones);
        EXPECT_EQ(rep.covered_demand, r.solution.covered_demand);
        EXPECT_EQ(rep.countable_demand, r.solution.countable_demand);
        EXPECT_NEAR(rep.total_cost, r.solution.total_cost, 1e-9);
        for (std::size_t k = 0; k < rep.zones.size(); ++k)
            EXPECT_NEAR(rep.zones[k].diameter_sq, r.solution.zones[k].diameter_sq(), 1e-12);
    }
}

TEST(GeoJson, OneFeaturePerZoneWithProperties) {
    const auto inst = mzp::testing::grid_instance(3, 3, 1);
    auto p = inst.params;
    p.enforce_zone_budget = false;
    const std::vector<Zone> zones{Zone::make({0, 1, 3, 4}, inst.distances, p), Zone::make({8}, inst.distances, p),
                                  Zone::make({2, 5}, inst.distances, p)};
    const auto doc = zones_geojson(inst, zones);
    ASSERT_EQ(doc["features"].size(), 3u);
    const auto& poly = doc["features"][0];
    EXPECT_EQ(poly["geometry"]["type"], "Polygon");
    const auto& ring = poly["geometry"]["coordinates"][0];
    EXPECT_EQ(ring.front(), ring.back());
    EXPECT_EQ(ring.size(), 5u);
    EXPECT_EQ(poly["properties"]["cells"], json({0, 1, 3, 4}));
    EXPECT_TRUE(poly["properties"].contains("cost"));
    EXPECT_TRUE(poly["properties"].contains("diameter_sq"));
    EXPECT_TRUE(poly["properties"].contains("demand"));
    EXPECT_EQ(doc["features"][1]["geometry"]["type"], "Point");
    EXPECT_EQ(doc["features"][2]["geometry"]["type"], "LineString");
}

TEST(SolutionFile, ZoneCellsRoundTripAndSchemaErrors) {
    EXPECT_THROW(solution_zone_cells(json{{"zones", json::array()}}), ParseError);
    EXPECT_THROW(solution_zone_cells(json{{"format", kSolutionFormat}, {"zones", {{{"cells", {1, "x"}}}}}}), ParseError);
    const auto cells = solution_zone_cells(json{{"format", kSolutionFormat}, {"zones", {{{"cells", {3, 1}}}}}});
    EXPECT_EQ(cells, (std::vector<std::vector<CellId>>{{3, 1}}));
}

TEST(Commands, GenSyntheticIsDeterministic) {
    TempDir dir("gen");
    cmd::GenerateOptions o;
    o.spec.rows = 5;
    o.spec.cols = 5;
    o.out = dir.file("a.json");
    const auto d1 = cmd::gen_synthetic(o);
    o.out = dir.file("b.json");
    const auto d2 = cmd::gen_synthetic(o);
    EXPECT_EQ(d1, d2);
    EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json")));
    const auto inst = load_instance(dir.file("a.json"));
    EXPECT_EQ(inst.size(), 25);
    EXPECT_NO_THROW(inst.validate());
}

TEST(Commands, GenSyntheticSmallGridConcentratesDemandNearHotspot) {
    SyntheticSpec s;
    s.rows = 2;
    s.cols = 2;
    s.hotspots = 1;
    s.density = 1.0;
    const auto inst = generate_instance(s);
    EXPECT_EQ(inst.size(), 4);
    EXPECT_GT(inst.demand.total(), 0.0);
}

TEST(Commands, IngestFixtureCityIsStable) {
    TempDir dir("ingest");
    auto o = write_city(dir, 5, 5, 500);
    const auto a = cmd::ingest(o);
    o.out = dir.file("again.json");
    const auto b = cmd::ingest(o);
    EXPECT_EQ(a.digest, b.digest);
    EXPECT_EQ(slurp(dir.file("instance.json")), slurp(dir.file("again.json")));
    const auto inst = load_instance(o.out);
    EXPECT_EQ(inst.size(), 25);
    EXPECT_EQ(a.trips_read, 500u);
    EXPECT_NEAR(inst.demand.total(), a.demand_total, 1e-9);
}

TEST(Commands, IngestMinimalTwoCellFixtureConservesDemand) {
    TempDir dir("ingest2");
    auto o = write_city(dir, 2, 2, 40);
    o.min_trip_m = 0.0;
    const auto s = cmd::ingest(o);
    double trips = 0.0;
    const auto t = parse_trips(csv::read_file(o.trips));
    for (const auto& r : t) trips += r.count;
    EXPECT_DOUBLE_EQ(s.demand_total, trips);
}

TEST(Commands, IngestShortTripsGiveEmptyDemandAndWarning) {
    TempDir dir("ingest3");
    auto o = write_city(dir, 2, 3, 30, 400.0);
    o.min_trip_m = 500.0;
    std::ostringstream log;
    const auto s = cmd::ingest(o, log);
    EXPECT_EQ(s.trips_kept, 0u);
    EXPECT_EQ(s.demand_total, 0.0);
    EXPECT_NE(log.str().find("warning"), std::string::npos);
}

TEST(Commands, IngestErrorsCarryFileContext) {
    TempDir dir("ingest4");
    auto o = write_city(dir, 2, 2, 5);
    spit(o.trips, "origin_lat,origin_lon,dest_lat,dest_lon\n1,2,3\n");
    try {
        cmd::ingest(o);
        FAIL() << "expected a parse error";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("trips.csv"), std::string::npos) << e.what();
    }
}

TEST(Commands, SolveReplaysByteForByte) {
    TempDir dir("solve");
    cmd::GenerateOptions g;
    g.spec.rows = 4;
    g.spec.cols = 5;
    g.out = dir.file("inst.json");
    cmd::gen_synthetic(g);
    cmd::SolveOptions o;
    o.instance = g.out;
    o.deterministic = true;
    o.config.seed = 12;
    o.out_dir = dir.file("a");
    cmd::solve(o);
    o.out_dir = dir.file("b");
    cmd::solve(o);
    for (const char* f : {"solution.json", "trace.jsonl", "zones.geojson"})
        EXPECT_EQ(slurp(dir.file(std::string("a/") + f)), slurp(dir.file(std::string("b/") + f))) << f;
    const auto trace = slurp(dir.file("a/trace.jsonl"));
    EXPECT_EQ(trace.find("wall_time"), std::string::npos);
}

TEST(Commands, SolveZeroLimitAndEvaluateAgree) {
    TempDir dir("solve0");
    cmd::GenerateOptions g;
    g.out = dir.file("inst.json");
    cmd::gen_synthetic(g);
    cmd::SolveOptions o;
    o.instance = g.out;
    o.out_dir = dir.file("out");
    o.config.total_time_limit = 0.0;
    const auto out = cmd::solve(o);
    EXPECT_TRUE(out.result.trace.iterations.empty());
    EXPECT_EQ(out.result.pool.size(), out.result.trace.initial_pool_size);
    cmd::EvaluateOptions e;
    e.instance = g.out;
    e.solution = out.solution_path;
    const auto rep = cmd::evaluate_files(e);
    EXPECT_EQ(rep.covered_demand, out.result.solution.covered_demand);
    const auto doc = read_json_file(out.solution_path);
    EXPECT_EQ(doc["coverage"].get<double>(), rep.coverage());
}

TEST(Commands, SolveInfeasibleZoneBudget) {
    TempDir dir("solve-inf");
    cmd::GenerateOptions g;
    g.out = dir.file("inst.json");
    cmd::gen_synthetic(g);
    cmd::SolveOptions o;
    o.instance = g.out;
    o.out_dir = dir.file("out");
    o.params.zone_budget = 0.5;
    EXPECT_THROW(cmd::solve(o), InfeasibleError);
}

TEST(Commands, OracleGuardAndSmallSolve) {
    TempDir dir("oracle");
    cmd::GenerateOptions g;
    g.spec.rows = 2;
    g.spec.cols = 3;
    g.out = dir.file("small.json");
    cmd::gen_synthetic(g);
    cmd::OracleOptions o;
    o.instance = g.out;
    o.out = dir.file("oracle.json");
    const auto s = cmd::oracle(o);
    cmd::SolveOptions so;
    so.instance = g.out;
    so.out_dir = dir.file("cg");
    so.config.pricing = PricingMode::exact;
    EXPECT_LE(cmd::solve(so).result.solution.covered_demand, s.covered_demand + 1e-9);

    g.spec.rows = 3;
    g.out = dir.file("big.json");
    cmd::gen_synthetic(g);
    o.instance = g.out;
    EXPECT_THROW(cmd::oracle(o), GuardError);
}
