#pragma once
/// Input side: trip/cell/network CSVs, GeoJSON boundaries, trip filtering,
/// cell assignment, and the versioned instance document.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mzp/core_model.hpp"
#include "mzp/errors.hpp"
#include "mzp/geo.hpp"
#include "mzp/util.hpp"

namespace mzp {

using json = nlohmann::json;

struct TripRecord {
    LatLon origin;
    LatLon destination;
    double count = 1.0;
};

struct RoadNode {
    long id = 0;
    LatLon position;
};

struct RoadEdge {
    int from = 0;  ///< index into RoadNetwork::nodes
    int to = 0;
    double weight = 0.0;  ///< nominal driving time, seconds
};

struct RoadNetwork {
    std::vector<RoadNode> nodes;
    std::vector<RoadEdge> edges;

    void validate() const {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& edge = edges[e];
            if (edge.from < 0 || edge.to < 0 || static_cast<std::size_t>(edge.from) >= nodes.size() ||
                static_cast<std::size_t>(edge.to) >= nodes.size())
                throw ValidationError("edge " + std::to_string(e) + ": endpoint does not exist");
            if (!std::isfinite(edge.weight) || edge.weight < 0.0)
                throw ValidationError("edge " + std::to_string(e) + ": weight must be finite and >= 0");
        }
    }
};

struct Instance {
    std::vector<Cell> cells;
    DemandMatrix demand;
    DistanceMatrix distances;
    CostParams params;
    std::optional<json> boundary;  ///< GeoJSON geometry, kept verbatim
    json provenance = json::object();

    int size() const { return static_cast<int>(cells.size()); }

    void validate() const {
        validate_cells(cells);
        params.validate();
        if (distances.size() != size())
            throw ValidationError("distances: dimension " + std::to_string(distances.size()) +
                                  " does not match " + std::to_string(size()) + " cells");
        if (demand.size() != size())
            throw ValidationError("demand: dimension " + std::to_string(demand.size()) +
                                  " does not match " + std::to_string(size()) + " cells");
    }

    friend bool operator==(const Instance&, const Instance&) = default;
};

// ---- CSV ---------------------------------------------------------------------

namespace csv {

struct Table {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_of_row;

    int column(const std::string& name, bool required = true) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return static_cast<int>(c);
        if (required) throw ParseError(source + ": missing column '" + name + "'");
        return -1;
    }

    std::string where(std::size_t r, const std::string& col) const {
        return source + ":" + std::to_string(line_of_row[r]) + ": field '" + col + "'";
    }

    double number(std::size_t r, int c, const std::string& col) const {
        const std::string& s = rows[r][static_cast<std::size_t>(c)];
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
            throw ParseError(where(r, col) + ": not a finite number: '" + s + "'");
        return v;
    }

    long integer(std::size_t r, int c, const std::string& col) const {
        const std::string& s = rows[r][static_cast<std::size_t>(c)];
        errno = 0;
        char* end = nullptr;
        const long v = std::strtol(s.c_str(), &end, 10);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
            throw ParseError(where(r, col) + ": not an integer: '" + s + "'");
        return v;
    }
};

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline Table parse(std::istream& in, const std::string& source) {
    Table t;
    t.source = source;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError(source + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.line_of_row.push_back(lineno);
    }
    if (t.header.empty()) throw ParseError(source + ": empty file (header required)");
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse(in, path);
}

}  // namespace csv

/// Trips CSV: origin_lat,origin_lon,dest_lat,dest_lon[,count]
inline std::vector<TripRecord> parse_trips(const csv::Table& t) {
    const int olat = t.column("origin_lat"), olon = t.column("origin_lon");
    const int dlat = t.column("dest_lat"), dlon = t.column("dest_lon");
    const int cnt = t.column("count", false);
    std::vector<TripRecord> trips;
    trips.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        TripRecord trip{{t.number(r, olat, "origin_lat"), t.number(r, olon, "origin_lon")},
                        {t.number(r, dlat, "dest_lat"), t.number(r, dlon, "dest_lon")},
                        cnt >= 0 ? t.number(r, cnt, "count") : 1.0};
        if (!(trip.count > 0.0)) throw ParseError(t.where(r, "count") + ": must be > 0");
        trips.push_back(trip);
    }
    return trips;
}

/// Cells CSV: id,lat,lon[,tag]; ids must be exactly 0..n-1 in order.
inline std::vector<Cell> parse_cells(const csv::Table& t) {
    const int id = t.column("id"), lat = t.column("lat"), lon = t.column("lon");
    const int tag = t.column("tag", false);
    std::vector<Cell> cells;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Cell c;
        c.id = static_cast<CellId>(t.integer(r, id, "id"));
        if (c.id != static_cast<CellId>(r))
            throw ParseError(t.where(r, "id") + ": expected " + std::to_string(r));
        c.centroid = {t.number(r, lat, "lat"), t.number(r, lon, "lon")};
        if (tag >= 0 && !t.rows[r][static_cast<std::size_t>(tag)].empty())
            c.tag = t.rows[r][static_cast<std::size_t>(tag)];
        cells.push_back(std::move(c));
    }
    if (cells.empty()) throw ParseError(t.source + ": no cells");
    return cells;
}

/// nodes.csv (id,lat,lon) + edges.csv (from,to,travel_time_s).
inline RoadNetwork parse_network(const csv::Table& nodes, const csv::Table& edges) {
    RoadNetwork net;
    std::unordered_map<long, int> index;
    const int id = nodes.column("id"), lat = nodes.column("lat"), lon = nodes.column("lon");
    for (std::size_t r = 0; r < nodes.rows.size(); ++r) {
        RoadNode node{nodes.integer(r, id, "id"),
                      {nodes.number(r, lat, "lat"), nodes.number(r, lon, "lon")}};
        if (!index.emplace(node.id, static_cast<int>(net.nodes.size())).second)
            throw ParseError(nodes.where(r, "id") + ": duplicate node id " + std::to_string(node.id));
        net.nodes.push_back(node);
    }
    const int from = edges.column("from"), to = edges.column("to"), w = edges.column("travel_time_s");
    for (std::size_t r = 0; r < edges.rows.size(); ++r) {
        const long a = edges.integer(r, from, "from");
        const long b = edges.integer(r, to, "to");
        const auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end()) throw ParseError(edges.where(r, "from") + ": unknown node " + std::to_string(a));
        if (ib == index.end()) throw ParseError(edges.where(r, "to") + ": unknown node " + std::to_string(b));
        const double weight = edges.number(r, w, "travel_time_s");
        if (weight < 0.0) throw ParseError(edges.where(r, "travel_time_s") + ": must be >= 0");
        net.edges.push_back({ia->second, ib->second, weight});
    }
    return net;
}

// ---- boundary -----------------------------------------------------------------

/// Accepts a GeoJSON Polygon or MultiPolygon, bare or wrapped in a Feature
/// or a single-feature FeatureCollection. Returns the bare geometry.
inline json boundary_geometry(const json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string())
        throw InputError("boundary: not a GeoJSON object");
    const std::string type = doc["type"];
    if (type == "Feature") {
        if (!doc.contains("geometry")) throw InputError("boundary: Feature without geometry");
        return boundary_geometry(doc["geometry"]);
    }
    if (type == "FeatureCollection") {
        if (!doc.contains("features") || !doc["features"].is_array() || doc["features"].size() != 1)
            throw InputError("boundary: FeatureCollection must hold exactly one feature");
        return boundary_geometry(doc["features"][0]);
    }
    if (type != "Polygon" && type != "MultiPolygon")
        throw InputError("boundary: unsupported geometry type '" + type + "'");
    return doc;
}

inline geo::Region parse_region(const json& geometry) {
    const json g = boundary_geometry(geometry);
    auto ring_of = [](const json& arr) {
        if (!arr.is_array()) throw InputError("boundary: ring is not an array");
        geo::Ring ring;
        for (const auto& pos : arr) {
            if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
                throw InputError("boundary: position must be [lon, lat]");
            ring.push_back({pos[1].get<double>(), pos[0].get<double>()});
        }
        return ring;
    };
    auto polygon_of = [&](const json& arr) {
        if (!arr.is_array() || arr.empty()) throw InputError("boundary: polygon has no rings");
        geo::Polygon p;
        for (const auto& r : arr) p.rings.push_back(ring_of(r));
        return p;
    };
    geo::Region region;
    if (!g.contains("coordinates")) throw InputError("boundary: missing coordinates");
    if (g["type"] == "Polygon") {
        region.polygons.push_back(polygon_of(g["coordinates"]));
    } else {
        if (!g["coordinates"].is_array()) throw InputError("boundary: coordinates must be an array");
        for (const auto& p : g["coordinates"]) region.polygons.push_back(polygon_of(p));
    }
    region.validate();
    return region;
}

// ---- filtering and aggregation ----------------------------------------------------

/// Keep trips with both ends inside `boundary` (when given) and a great-circle
/// length of at least `min_distance_m`.
inline std::vector<TripRecord> filter_trips(const std::vector<TripRecord>& trips,
                                            const geo::Region* boundary, double min_distance_m) {
    if (!(min_distance_m >= 0.0)) throw InputError("min_distance_m must be >= 0");
    if (boundary) boundary->validate();
    std::vector<TripRecord> kept;
    kept.reserve(trips.size());
    for (const auto& t : trips) {
        if (boundary && !(geo::region_contains(*boundary, t.origin) &&
                          geo::region_contains(*boundary, t.destination)))
            continue;
        if (geo::great_circle_m(t.origin, t.destination) < min_distance_m) continue;
        kept.push_back(t);
    }
    return kept;
}

/// Index of the nearest centroid; ties go to the lowest id.
inline CellId nearest_cell(const std::vector<Cell>& cells, const LatLon& p) {
    CellId best = 0;
    double best_d = kInf;
    for (const auto& c : cells) {
        const double d = geo::great_circle_m(c.centroid, p);
        if (d < best_d) {
            best_d = d;
            best = c.id;
        }
    }
    return best;
}

inline DemandMatrix assign_to_cells(const std::vector<TripRecord>& trips, const std::vector<Cell>& cells) {
    if (cells.empty()) throw InputError("assign_to_cells: no cells");
    std::map<std::pair<CellId, CellId>, double> acc;
    for (const auto& t : trips)
        acc[{nearest_cell(cells, t.origin), nearest_cell(cells, t.destination)}] += t.count;
    std::vector<DemandEntry> triples;
    triples.reserve(acc.size());
    for (const auto& [key, v] : acc) triples.push_back({key.first, key.second, v});
    return DemandMatrix::from_triples(static_cast<int>(cells.size()), std::move(triples));
}

// ---- instance document --------------------------------------------------------------

inline constexpr const char* kInstanceFormat = "mzp-instance";
inline constexpr int kInstanceVersion = 1;

inline json params_to_json(const CostParams& p) {
    return {{"alpha", p.alpha},
            {"beta", p.beta},
            {"budget", p.budget},
            {"zone_budget", p.zone_budget},
            {"include_self_pairs", p.include_self_pairs},
            {"enforce_zone_budget", p.enforce_zone_budget}};
}

inline json instance_to_json(const Instance& inst) {
    json cells = json::array();
    for (const auto& c : inst.cells) {
        json jc = {{"id", c.id}, {"lat", c.centroid.lat}, {"lon", c.centroid.lon},
                   {"node", c.network_node}};
        if (c.tag) jc["tag"] = *c.tag;
        cells.push_back(std::move(jc));
    }
    json demand = json::array();
    for (const auto& e : inst.demand.entries()) demand.push_back({e.from, e.to, e.value});
    json rows = json::array();
    const int n = inst.distances.size();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j = 0; j < n; ++j) row.push_back(inst.distances(i, j));
        rows.push_back(std::move(row));
    }
    json doc = {{"format", kInstanceFormat},
                {"version", kInstanceVersion},
                {"cells", std::move(cells)},
                {"demand", std::move(demand)},
                {"distances", {{"normalization_factor", inst.distances.normalization_factor()},
                               {"values", std::move(rows)}}},
                {"params", params_to_json(inst.params)},
                {"boundary", inst.boundary ? *inst.boundary : json(nullptr)},
                {"provenance", inst.provenance}};
    return doc;
}

namespace detail {

inline const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError("instance: missing field '" + path + key + "'");
    return obj[key];
}

template <class T>
T get_as(const json& v, const std::string& path) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ParseError("instance: field '" + path + "' has the wrong type");
    }
}

inline double number(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number()) throw ParseError("instance: field '" + path + key + "' must be a number");
    return v.get<double>();
}

}  // namespace detail

inline CostParams params_from_json(const json& p, const std::string& path = "params.") {
    CostParams out;
    out.alpha = detail::number(p, "alpha", path);
    out.beta = detail::number(p, "beta", path);
    out.budget = detail::number(p, "budget", path);
    out.zone_budget = detail::number(p, "zone_budget", path);
    if (p.contains("include_self_pairs"))
        out.include_self_pairs = detail::get_as<bool>(p["include_self_pairs"], path + "include_self_pairs");
    if (p.contains("enforce_zone_budget"))
        out.enforce_zone_budget = detail::get_as<bool>(p["enforce_zone_budget"], path + "enforce_zone_budget");
    return out;
}

inline Instance instance_from_json(const json& doc) {
    using detail::field;
    if (detail::get_as<std::string>(field(doc, "format", ""), "format") != kInstanceFormat)
        throw ParseError("instance: field 'format' must be \"" + std::string(kInstanceFormat) + "\"");
    const int version = detail::get_as<int>(field(doc, "version", ""), "version");
    if (version != kInstanceVersion)
        throw ParseError("instance: field 'version': unsupported version " + std::to_string(version));

    Instance inst;
    const json& cells = field(doc, "cells", "");
    if (!cells.is_array()) throw ParseError("instance: field 'cells' must be an array");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::string path = "cells[" + std::to_string(k) + "].";
        Cell c;
        c.id = detail::get_as<int>(field(cells[k], "id", path), path + "id");
        c.centroid = {detail::number(cells[k], "lat", path), detail::number(cells[k], "lon", path)};
        if (cells[k].contains("node")) c.network_node = detail::get_as<long>(cells[k]["node"], path + "node");
        if (cells[k].contains("tag") && !cells[k]["tag"].is_null())
            c.tag = detail::get_as<std::string>(cells[k]["tag"], path + "tag");
        inst.cells.push_back(std::move(c));
    }
    const int n = static_cast<int>(inst.cells.size());

    const json& demand = field(doc, "demand", "");
    if (!demand.is_array()) throw ParseError("instance: field 'demand' must be an array");
    std::vector<DemandEntry> triples;
    for (std::size_t k = 0; k < demand.size(); ++k) {
        const std::string path = "demand[" + std::to_string(k) + "]";
        const json& t = demand[k];
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
            !t[2].is_number())
            throw ParseError("instance: field '" + path + "' must be [i, j, value]");
        const double v = t[2].get<double>();
        if (!(v >= 0.0))
            throw ValidationError("instance: field '" + path + "': demand must be >= 0");
        triples.push_back({t[0].get<int>(), t[1].get<int>(), v});
    }
    try {
        inst.demand = DemandMatrix::from_triples(n, std::move(triples));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("instance: field 'demand': ") + e.what());
    }

    const json& dist = field(doc, "distances", "");
    const json& rows = field(dist, "values", "distances.");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw ValidationError("instance: field 'distances.values' must have one row per cell");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ValidationError("instance: field 'distances.values[" + std::to_string(i) +
                                  "]' must have " + std::to_string(n) + " entries");
        for (const auto& v : row) {
            if (!v.is_number())
                throw ParseError("instance: field 'distances.values[" + std::to_string(i) + "]' must be numeric");
            values.push_back(v.get<double>());
        }
    }
    try {
        inst.distances = DistanceMatrix(n, std::move(values),
                                        detail::number(dist, "normalization_factor", "distances."));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("instance: field 'distances': ") + e.what());
    }

    inst.params = params_from_json(field(doc, "params", ""));
    if (doc.contains("boundary") && !doc["boundary"].is_null()) {
        inst.boundary = doc["boundary"];
        (void)parse_region(*inst.boundary);
    }
    if (doc.contains("provenance")) inst.provenance = doc["provenance"];
    inst.validate();
    return inst;
}

/// Canonical serialization; identical instances give identical bytes.
inline std::string dump_instance(const Instance& inst) { return instance_to_json(inst).dump(1) + "\n"; }

inline std::string instance_digest(const Instance& inst) { return hex_digest(fnv1a(dump_instance(inst))); }

inline void save_instance(const Instance& inst, const std::string& path) {
    inst.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << dump_instance(inst);
    if (!out) throw InputError("write failed: " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex_digest(fnv1a(ss.str()));
}

}  // namespace mzp
