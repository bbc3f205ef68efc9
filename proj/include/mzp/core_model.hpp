#pragma once
/// Shared vocabulary: cells, demand, distances, cost parameters, zones and
/// the dual prices that drive column generation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mzp/errors.hpp"

namespace mzp {

using CellId = int;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
    friend bool operator==(const LatLon&, const LatLon&) = default;
};

struct Cell {
    CellId id = 0;
    LatLon centroid;
    long network_node = -1;  ///< road-graph node nearest the centroid, -1 if unmapped
    std::optional<std::string> tag;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Check the id/coordinate invariants of a cell list.
inline void validate_cells(std::span<const Cell> cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].id != static_cast<CellId>(k))
            throw ValidationError("cells[" + std::to_string(k) + "].id: expected " +
                                  std::to_string(k) + ", got " + std::to_string(cells[k].id));
        if (!std::isfinite(cells[k].centroid.lat) || !std::isfinite(cells[k].centroid.lon))
            throw ValidationError("cells[" + std::to_string(k) + "]: non-finite centroid");
    }
}

struct DemandEntry {
    CellId from = 0;
    CellId to = 0;
    double value = 0.0;
    friend bool operator==(const DemandEntry&, const DemandEntry&) = default;
};

/// Sparse origin-destination demand. Entries are kept sorted by (from, to),
/// unique, and strictly positive.
class DemandMatrix {
public:
    DemandMatrix() = default;
    explicit DemandMatrix(int n) : n_(n) {}

    /// Build from arbitrary triples; duplicates are summed and zeros dropped.
    static DemandMatrix from_triples(int n, std::vector<DemandEntry> triples) {
        DemandMatrix m(n);
        for (const auto& e : triples) {
            if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
                throw ValidationError("demand entry (" + std::to_string(e.from) + "," +
                                      std::to_string(e.to) + ") outside 0.." +
                                      std::to_string(n - 1));
            if (!(e.value >= 0.0) || !std::isfinite(e.value))
                throw ValidationError("demand entry (" + std::to_string(e.from) + "," +
                                      std::to_string(e.to) + ") must be finite and >= 0");
        }
        std::stable_sort(triples.begin(), triples.end(), [](const auto& a, const auto& b) {
            return std::pair(a.from, a.to) < std::pair(b.from, b.to);
        });
        for (const auto& e : triples) {
            if (!m.entries_.empty() && m.entries_.back().from == e.from &&
                m.entries_.back().to == e.to)
                m.entries_.back().value += e.value;
            else
                m.entries_.push_back(e);
        }
        std::erase_if(m.entries_, [](const DemandEntry& e) { return e.value <= 0.0; });
        return m;
    }

    int size() const { return n_; }
    std::span<const DemandEntry> entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    double at(CellId i, CellId j) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(i, j),
                                   [](const DemandEntry& e, const std::pair<int, int>& key) {
                                       return std::pair(e.from, e.to) < key;
                                   });
        return (it != entries_.end() && it->from == i && it->to == j) ? it->value : 0.0;
    }

    double total() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.value;
        return s;
    }

    friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

private:
    int n_ = 0;
    std::vector<DemandEntry> entries_;
};

/// Dense cell-to-cell travel times, normalized so the largest entry is 1.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(int n, std::vector<double> values, double normalization_factor = 1.0)
        : n_(n), values_(std::move(values)), factor_(normalization_factor) {
        if (values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
            throw ValidationError("distances: expected " + std::to_string(n) + "x" +
                                  std::to_string(n) + " values, got " +
                                  std::to_string(values_.size()));
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                double v = (*this)(i, j);
                if (!std::isfinite(v) || v < 0.0)
                    throw ValidationError("distances[" + std::to_string(i) + "][" +
                                          std::to_string(j) + "] must be finite and >= 0");
            }
            if ((*this)(i, i) != 0.0)
                throw ValidationError("distances[" + std::to_string(i) + "][" +
                                      std::to_string(i) + "] must be 0");
        }
        if (!(factor_ > 0.0) || !std::isfinite(factor_))
            throw ValidationError("distances.normalization_factor must be positive");
    }

    int size() const { return n_; }
    double operator()(CellId i, CellId j) const {
        return values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                       static_cast<std::size_t>(j)];
    }
    /// max(c(i,j), c(j,i)); diameters are built from this symmetric view.
    double two_way(CellId i, CellId j) const { return std::max((*this)(i, j), (*this)(j, i)); }
    double normalization_factor() const { return factor_; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> values_;
    double factor_ = 1.0;
};

struct CostParams {
    double alpha = 5.0;
    double beta = 1.0;
    double budget = 8.0;       ///< global budget B
    double zone_budget = 2.0;  ///< single-zone budget B0
    bool include_self_pairs = false;
    bool enforce_zone_budget = true;

    void validate() const {
        if (!(alpha >= 0.0)) throw ValidationError("params.alpha must be >= 0");
        if (!(beta > 0.0)) throw ValidationError("params.beta must be > 0");
        if (!(budget >= beta)) throw ValidationError("params.budget must be >= beta");
        if (enforce_zone_budget && !(zone_budget >= beta))
            throw ValidationError("params.zone_budget must be >= beta");
    }

    /// Largest squared diameter a zone may have under B0.
    double max_diameter_sq() const {
        return enforce_zone_budget && alpha > 0.0 ? (zone_budget - beta) / alpha : kHuge;
    }

    bool zone_affordable(double diameter_sq) const {
        return !enforce_zone_budget || alpha * diameter_sq + beta <= zone_budget + 1e-9;
    }

    friend bool operator==(const CostParams&, const CostParams&) = default;

private:
    static constexpr double kHuge = 1e300;
};

inline void check_cell_ids(std::span<const CellId> cells, int n) {
    for (CellId c : cells)
        if (c < 0 || c >= n)
            throw InputError("cell id " + std::to_string(c) + " outside 0.." +
                             std::to_string(n - 1));
}

/// Squared diameter: max over unordered pairs of the two-way distance, squared.
inline double zone_diameter_sq(std::span<const CellId> cells, const DistanceMatrix& dist) {
    if (cells.empty()) throw InputError("zone_diameter_sq: empty cell set");
    check_cell_ids(cells, dist.size());
    double d = 0.0;
    for (std::size_t a = 0; a < cells.size(); ++a)
        for (std::size_t b = a + 1; b < cells.size(); ++b)
            d = std::max(d, dist.two_way(cells[a], cells[b]));
    return d * d;
}

inline double zone_cost(double diameter_sq, const CostParams& params) {
    return params.alpha * diameter_sq + params.beta;
}

/// Ordered-pair demand inside `cells`; self pairs only when requested.
inline double intra_zone_demand(std::span<const CellId> cells, const DemandMatrix& demand,
                                bool include_self_pairs) {
    if (cells.empty()) throw InputError("intra_zone_demand: empty cell set");
    check_cell_ids(cells, demand.size());
    std::vector<char> in(static_cast<std::size_t>(demand.size()), 0);
    for (CellId c : cells) in[static_cast<std::size_t>(c)] = 1;
    double s = 0.0;
    for (const auto& e : demand.entries()) {
        if (e.from == e.to && !include_self_pairs) continue;
        if (in[static_cast<std::size_t>(e.from)] && in[static_cast<std::size_t>(e.to)])
            s += e.value;
    }
    return s;
}

/// One CG column: a sorted, duplicate-free cell set with cached diameter and cost.
class Zone {
public:
    Zone() = default;

    static Zone make(std::vector<CellId> cells, const DistanceMatrix& dist,
                     const CostParams& params) {
        if (cells.empty()) throw InputError("zone must contain at least one cell");
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        Zone z;
        z.diameter_sq_ = zone_diameter_sq(cells, dist);
        z.cost_ = zone_cost(z.diameter_sq_, params);
        z.cells_ = std::move(cells);
        return z;
    }

    std::span<const CellId> cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    double diameter_sq() const { return diameter_sq_; }
    double cost() const { return cost_; }
    bool contains(CellId c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

    /// Equality is by cell set; caches follow from it.
    friend bool operator==(const Zone& a, const Zone& b) { return a.cells_ == b.cells_; }
    friend bool operator<(const Zone& a, const Zone& b) { return a.cells_ < b.cells_; }

private:
    std::vector<CellId> cells_;
    double diameter_sq_ = 0.0;
    double cost_ = 0.0;
};

struct PairDual {
    CellId from = 0;
    CellId to = 0;
    double value = 0.0;
};

/// Dual prices of the restricted master: lambda for the budget row and one
/// pi per instantiated linking row.
struct Duals {
    double lambda = 0.0;
    std::vector<PairDual> pi;  ///< sorted by (from, to)

    double pi_sum() const {
        double s = 0.0;
        for (const auto& p : pi) s += p.value;
        return s;
    }
};

inline double reduced_cost(const Zone& zone, const Duals& duals) {
    double s = 0.0;
    for (const auto& p : duals.pi)
        if (p.value != 0.0 && zone.contains(p.from) && zone.contains(p.to)) s += p.value;
    return s - duals.lambda * zone.cost();
}

/// Reduced cost of a zone: pi mass inside minus lambda times the zone cost.
/// `params` is accepted for symmetry with callers that hold a bare cell set;
/// the cost is taken from the zone's cache.
inline double reduced_cost(const Zone& zone, const Duals& duals, const CostParams& /*params*/) {
    return reduced_cost(zone, duals);
}

/// Demand of all pairs whose endpoints share at least one zone, each pair once.
inline double covered_demand(std::span<const Zone> zones, const DemandMatrix& demand,
                             bool include_self_pairs) {
    const auto n = static_cast<std::size_t>(demand.size());
    std::vector<std::vector<int>> zones_of(n);
    for (std::size_t z = 0; z < zones.size(); ++z)
        for (CellId c : zones[z].cells()) zones_of[static_cast<std::size_t>(c)].push_back(static_cast<int>(z));
    double s = 0.0;
    for (const auto& e : demand.entries()) {
        if (e.from == e.to && !include_self_pairs) continue;
        const auto& a = zones_of[static_cast<std::size_t>(e.from)];
        const auto& b = zones_of[static_cast<std::size_t>(e.to)];
        bool shared = false;
        for (int za : a)
            if (std::find(b.begin(), b.end(), za) != b.end()) {
                shared = true;
                break;
            }
        if (shared) s += e.value;
    }
    return s;
}

/// Demand the model can ever count: all off-diagonal entries, plus the
/// diagonal when self pairs are enabled.
inline double countable_demand(const DemandMatrix& demand, bool include_self_pairs) {
    double s = 0.0;
    for (const auto& e : demand.entries())
        if (e.from != e.to || include_self_pairs) s += e.value;
    return s;
}

}  // namespace mzp
