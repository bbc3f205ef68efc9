#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mzp/core_model.hpp"
#include "mzp/errors.hpp"

namespace mzp::geo {

inline constexpr double kEarthRadiusM = 6371008.8;

inline double great_circle_m(const LatLon& a, const LatLon& b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(s)));
}

/// Offset a point by (east, north) meters on a local tangent plane.
inline LatLon offset_m(const LatLon& origin, double east_m, double north_m) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double m_per_deg = kEarthRadiusM * rad;
    return {origin.lat + north_m / m_per_deg,
            origin.lon + east_m / (m_per_deg * std::cos(origin.lat * rad))};
}

using Ring = std::vector<LatLon>;

/// A polygon with holes; `rings[0]` is the outer boundary.
struct Polygon {
    std::vector<Ring> rings;
};

/// One or more polygons; a point is inside if it is inside any member.
struct Region {
    std::vector<Polygon> polygons;

    void validate() const {
        if (polygons.empty()) throw InputError("boundary: no polygons");
        for (const auto& p : polygons) {
            if (p.rings.empty()) throw InputError("boundary: polygon without rings");
            for (const auto& r : p.rings) {
                if (r.size() < 4)
                    throw InputError("boundary: ring needs at least 4 positions");
                if (!(r.front() == r.back())) throw InputError("boundary: ring is not closed");
                for (const auto& q : r)
                    if (!std::isfinite(q.lat) || !std::isfinite(q.lon))
                        throw InputError("boundary: non-finite coordinate");
            }
        }
    }
};

/// Even-odd ray casting in (lon, lat) space.
inline bool ring_contains(const Ring& ring, const LatLon& p) {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const auto& a = ring[i];
        const auto& b = ring[j];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

inline bool polygon_contains(const Polygon& poly, const LatLon& p) {
    if (!ring_contains(poly.rings[0], p)) return false;
    for (std::size_t h = 1; h < poly.rings.size(); ++h)
        if (ring_contains(poly.rings[h], p)) return false;
    return true;
}

inline bool region_contains(const Region& region, const LatLon& p) {
    return std::any_of(region.polygons.begin(), region.polygons.end(),
                       [&](const Polygon& poly) { return polygon_contains(poly, p); });
}

/// Monotone-chain convex hull in (lon, lat). Returns a closed ring when the
/// points span an area, otherwise the distinct input points.
inline std::vector<LatLon> convex_hull(std::vector<LatLon> pts) {
    auto key = [](const LatLon& a, const LatLon& b) {
        return a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat);
    };
    std::sort(pts.begin(), pts.end(), key);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const LatLon& o, const LatLon& a, const LatLon& b) {
        return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
    };
    std::vector<LatLon> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k);  // last point repeats the first: closed ring
    if (hull.size() < 4) {
        hull.pop_back();
        return hull;  // collinear
    }
    return hull;
}

}  // namespace mzp::geo
