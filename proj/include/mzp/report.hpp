#pragma once
/// Solution files, independent evaluation, per-iteration trace records and
/// GeoJSON export.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "mzp/cg_driver.hpp"
#include "mzp/ingest.hpp"

namespace mzp {

inline constexpr const char* kSolutionFormat = "mzp-solution";
inline constexpr int kSolutionVersion = 1;

inline json cg_config_to_json(const CgConfig& c) {
    auto limit = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"pricing", to_string(c.pricing)},
            {"time_limit", limit(c.total_time_limit)},
            {"pricing_time_limit", limit(c.pricing_time_limit)},
            {"final_time_limit", limit(c.final_time_limit)},
            {"runs", c.runs},
            {"seed", c.seed},
            {"perturb", c.perturb},
            {"max_iterations", c.max_iterations}};
}

inline json zone_to_json(const Zone& z, const Instance& inst) {
    return {{"cells", std::vector<CellId>(z.cells().begin(), z.cells().end())},
            {"cost", z.cost()},
            {"diameter_sq", z.diameter_sq()},
            {"demand", intra_zone_demand(z.cells(), inst.demand, inst.params.include_self_pairs)}};
}

/// Solution document. Holds no wall-clock data, so a replayed run with the
/// same seed writes identical bytes.
inline json solution_to_json(const CgResult& r, const Instance& inst, const CgConfig& config) {
    json zones = json::array();
    for (const auto& z : r.solution.zones) zones.push_back(zone_to_json(z, inst));
    return {{"format", kSolutionFormat},
            {"version", kSolutionVersion},
            {"instance_digest", instance_digest(inst)},
            {"params", params_to_json(inst.params)},
            {"config", cg_config_to_json(config)},
            {"status", r.solution.status},
            {"termination", r.trace.termination},
            {"covered_demand", r.solution.covered_demand},
            {"countable_demand", r.solution.countable_demand},
            {"coverage", r.solution.coverage()},
            {"total_cost", r.solution.total_cost},
            {"master_bound", r.solution.bound},
            {"master_gap", r.solution.gap},
            {"lp_objective", r.trace.final_lp_objective},
            {"iterations", r.trace.iterations.size()},
            {"pool_size", r.pool.size()},
            {"zones", zones}};
}

/// Oracle solutions carry no CG trace.
inline json oracle_solution_to_json(const Solution& s, const Instance& inst) {
    json zones = json::array();
    for (const auto& z : s.zones) zones.push_back(zone_to_json(z, inst));
    return {{"format", kSolutionFormat},
            {"version", kSolutionVersion},
            {"instance_digest", instance_digest(inst)},
            {"params", params_to_json(inst.params)},
            {"method", "oracle"},
            {"status", s.status},
            {"covered_demand", s.covered_demand},
            {"countable_demand", s.countable_demand},
            {"coverage", s.coverage()},
            {"total_cost", s.total_cost},
            {"zones", zones}};
}

/// Cell lists of a solution document; nothing else is trusted.
inline std::vector<std::vector<CellId>> solution_zone_cells(const json& doc) {
    if (!doc.is_object()) throw ParseError("solution: expected a JSON object");
    if (doc.value("format", std::string{}) != kSolutionFormat)
        throw ParseError(std::string("solution: format must be '") + kSolutionFormat + "'");
    if (!doc.contains("zones") || !doc["zones"].is_array()) throw ParseError("solution: missing array 'zones'");
    std::vector<std::vector<CellId>> out;
    for (std::size_t k = 0; k < doc["zones"].size(); ++k) {
        const auto& z = doc["zones"][k];
        const std::string path = "zones[" + std::to_string(k) + "].cells";
        if (!z.is_object() || !z.contains("cells") || !z["cells"].is_array()) throw ParseError("solution: missing " + path);
        std::vector<CellId> cells;
        for (const auto& c : z["cells"]) {
            if (!c.is_number_integer()) throw ParseError("solution: " + path + " must hold integers");
            cells.push_back(c.get<CellId>());
        }
        out.push_back(std::move(cells));
    }
    return out;
}

struct ZoneReport {
    std::vector<CellId> cells;
    double cost = 0.0;
    double diameter_sq = 0.0;
    double demand = 0.0;
    bool affordable = true;
    int components = 1;
    bool connected() const { return components == 1; }
};

struct OverlapStats {
    int shared_cells = 0;          ///< cells in more than one zone
    int max_multiplicity = 0;      ///< most zones containing one cell
    int overlapping_zone_pairs = 0;
    int multiply_covered_pairs = 0;  ///< demand pairs inside more than one zone
    double multiply_covered_demand = 0.0;
};

struct EvaluationReport {
    double covered_demand = 0.0;
    double countable_demand = 0.0;
    double total_cost = 0.0;
    double budget = 0.0;
    double adjacency_radius_m = 0.0;
    std::vector<ZoneReport> zones;
    OverlapStats overlap;

    double coverage() const { return countable_demand > 0.0 ? covered_demand / countable_demand : 0.0; }
    bool within_budget() const { return total_cost <= budget + 1e-9; }
};

/// 1.5 times the median nearest-neighbour centroid spacing.
inline double default_adjacency_radius(const std::vector<Cell>& cells) {
    if (cells.size() < 2) return 0.0;
    std::vector<double> nearest;
    for (const auto& a : cells) {
        double best = kInf;
        for (const auto& b : cells)
            if (a.id != b.id) best = std::min(best, geo::great_circle_m(a.centroid, b.centroid));
        nearest.push_back(best);
    }
    std::nth_element(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(nearest.size() / 2), nearest.end());
    return 1.5 * nearest[nearest.size() / 2];
}

/// Recomputes every metric from the instance and the zone cell lists alone.
inline EvaluationReport evaluate(const Instance& inst, const std::vector<std::vector<CellId>>& zones,
                                 double adjacency_radius_m = -1.0) {
    const int n = inst.size();
    const bool self = inst.params.include_self_pairs;
    EvaluationReport rep;
    rep.budget = inst.params.budget;
    rep.adjacency_radius_m = adjacency_radius_m >= 0.0 ? adjacency_radius_m : default_adjacency_radius(inst.cells);

    std::vector<std::vector<char>> member;
    for (std::size_t k = 0; k < zones.size(); ++k) {
        if (zones[k].empty()) throw ValidationError("zones[" + std::to_string(k) + "]: empty zone");
        std::vector<char> in(static_cast<std::size_t>(n), 0);
        for (CellId c : zones[k]) {
            if (c < 0 || c >= n)
                throw ValidationError("zones[" + std::to_string(k) + "]: cell id " + std::to_string(c) +
                                      " is not in the instance (0.." + std::to_string(n - 1) + ")");
            in[static_cast<std::size_t>(c)] = 1;
        }
        member.push_back(std::move(in));
    }

    for (std::size_t k = 0; k < zones.size(); ++k) {
        ZoneReport z;
        for (CellId c = 0; c < n; ++c)
            if (member[k][static_cast<std::size_t>(c)]) z.cells.push_back(c);
        for (CellId a : z.cells)
            for (CellId b : z.cells) {
                const double d = std::max(inst.distances(a, b), inst.distances(b, a));
                z.diameter_sq = std::max(z.diameter_sq, d * d);
            }
        z.cost = inst.params.alpha * z.diameter_sq + inst.params.beta;
        z.affordable = inst.params.zone_affordable(z.diameter_sq);
        for (const auto& e : inst.demand.entries())
            if ((e.from != e.to || self) && member[k][static_cast<std::size_t>(e.from)] &&
                member[k][static_cast<std::size_t>(e.to)])
                z.demand += e.value;

        std::vector<int> comp(z.cells.size(), -1);
        z.components = 0;
        for (std::size_t s = 0; s < z.cells.size(); ++s) {
            if (comp[s] >= 0) continue;
            std::vector<std::size_t> stack{s};
            comp[s] = z.components;
            while (!stack.empty()) {
                const std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < z.cells.size(); ++v)
                    if (comp[v] < 0 &&
                        geo::great_circle_m(inst.cells[static_cast<std::size_t>(z.cells[u])].centroid,
                                            inst.cells[static_cast<std::size_t>(z.cells[v])].centroid) <=
                            rep.adjacency_radius_m) {
                        comp[v] = z.components;
                        stack.push_back(v);
                    }
            }
            ++z.components;
        }
        rep.total_cost += z.cost;
        rep.zones.push_back(std::move(z));
    }

    for (const auto& e : inst.demand.entries()) {
        if (e.from == e.to && !self) continue;
        rep.countable_demand += e.value;
        int hits = 0;
        for (const auto& in : member)
            if (in[static_cast<std::size_t>(e.from)] && in[static_cast<std::size_t>(e.to)]) ++hits;
        if (hits > 0) rep.covered_demand += e.value;
        if (hits > 1) {
            ++rep.overlap.multiply_covered_pairs;
            rep.overlap.multiply_covered_demand += e.value;
        }
    }
    for (CellId c = 0; c < n; ++c) {
        int m = 0;
        for (const auto& in : member) m += in[static_cast<std::size_t>(c)];
        rep.overlap.max_multiplicity = std::max(rep.overlap.max_multiplicity, m);
        if (m > 1) ++rep.overlap.shared_cells;
    }
    for (std::size_t a = 0; a < member.size(); ++a)
        for (std::size_t b = a + 1; b < member.size(); ++b)
            for (CellId c = 0; c < n; ++c)
                if (member[a][static_cast<std::size_t>(c)] && member[b][static_cast<std::size_t>(c)]) {
                    ++rep.overlap.overlapping_zone_pairs;
                    break;
                }
    return rep;
}

inline EvaluationReport evaluate(const Instance& inst, const std::vector<Zone>& zones, double adjacency_radius_m = -1.0) {
    std::vector<std::vector<CellId>> cells;
    for (const auto& z : zones) cells.emplace_back(z.cells().begin(), z.cells().end());
    return evaluate(inst, cells, adjacency_radius_m);
}

inline json report_to_json(const EvaluationReport& r) {
    json zones = json::array();
    for (std::size_t k = 0; k < r.zones.size(); ++k) {
        const auto& z = r.zones[k];
        zones.push_back({{"zone", k},
                         {"cells", z.cells},
                         {"cost", z.cost},
                         {"diameter_sq", z.diameter_sq},
                         {"demand", z.demand},
                         {"affordable", z.affordable},
                         {"connected", z.connected()},
                         {"components", z.components}});
    }
    return {{"coverage", r.coverage()},
            {"covered_demand", r.covered_demand},
            {"countable_demand", r.countable_demand},
            {"total_cost", r.total_cost},
            {"budget", r.budget},
            {"within_budget", r.within_budget()},
            {"adjacency_radius_m", r.adjacency_radius_m},
            {"zones", zones},
            {"overlap",
             {{"shared_cells", r.overlap.shared_cells},
              {"max_multiplicity", r.overlap.max_multiplicity},
              {"overlapping_zone_pairs", r.overlap.overlapping_zone_pairs},
              {"multiply_covered_pairs", r.overlap.multiply_covered_pairs},
              {"multiply_covered_demand", r.overlap.multiply_covered_demand}}}};
}

/// One trace.jsonl line. Wall time is left out when `with_time` is false.
inline json iteration_to_json(const CgIteration& it, bool with_time = true) {
    json j{{"iteration", it.iteration},
           {"pool_size", it.pool_size},
           {"lp_objective", it.lp_objective},
           {"lambda", it.lambda},
           {"max_pi", it.max_pi},
           {"columns_added", it.columns_added},
           {"best_reduced_cost", std::isfinite(it.best_reduced_cost) ? json(it.best_reduced_cost) : json(nullptr)},
           {"method", it.method},
           {"proven", it.proven},
           {"lp_iterations", it.lp_iterations}};
    if (with_time) j["wall_time"] = it.wall_time;
    return j;
}

inline std::string trace_to_jsonl(const CgTrace& t, bool with_time = true) {
    std::string out;
    for (const auto& it : t.iterations) out += iteration_to_json(it, with_time).dump() + "\n";
    return out;
}

/// FeatureCollection with one feature per zone: the convex hull of the member
/// centroids (a point or line for one or two cells) plus the raw membership.
inline json zones_geojson(const Instance& inst, const std::vector<Zone>& zones) {
    json features = json::array();
    auto coord = [](const LatLon& p) { return json::array({p.lon, p.lat}); };
    for (std::size_t k = 0; k < zones.size(); ++k) {
        const auto& z = zones[k];
        std::vector<LatLon> pts;
        for (CellId c : z.cells()) pts.push_back(inst.cells[static_cast<std::size_t>(c)].centroid);
        const auto hull = geo::convex_hull(pts);
        json geometry;
        if (hull.size() == 1) {
            geometry = {{"type", "Point"}, {"coordinates", coord(hull[0])}};
        } else if (hull.size() < 4) {
            json line = json::array();
            for (const auto& p : hull) line.push_back(coord(p));
            geometry = {{"type", "LineString"}, {"coordinates", line}};
        } else {
            json ring = json::array();
            for (const auto& p : hull) ring.push_back(coord(p));
            geometry = {{"type", "Polygon"}, {"coordinates", json::array({ring})}};
        }
        json props = zone_to_json(z, inst);
        props["zone"] = k;
        props["size"] = z.size();
        features.push_back({{"type", "Feature"}, {"geometry", geometry}, {"properties", props}});
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace mzp
