#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tileforge/error.hpp"

namespace tileforge {

/// WGS84 lon/lat in degrees, treated as planar Cartesian throughout.
struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
        return a.lon == b.lon && a.lat == b.lat;
    }
    friend bool operator!=(const GeoPoint& a, const GeoPoint& b) { return !(a == b); }
    // lexicographic (lon, lat); used for canonical ordering
    friend bool operator<(const GeoPoint& a, const GeoPoint& b) {
        if (a.lon != b.lon) return a.lon < b.lon;
        return a.lat < b.lat;
    }
};

struct BBox {
    double min_lon = 0.0;
    double min_lat = 0.0;
    double max_lon = 0.0;
    double max_lat = 0.0;

    bool valid() const { return min_lon <= max_lon && min_lat <= max_lat; }
    double width() const { return max_lon - min_lon; }
    double height() const { return max_lat - min_lat; }
    double area() const { return width() * height(); }

    // closed-set semantics: shared edges and corners count as intersecting
    bool intersects(const BBox& o) const {
        return min_lon <= o.max_lon && o.min_lon <= max_lon &&
               min_lat <= o.max_lat && o.min_lat <= max_lat;
    }
    bool contains(const GeoPoint& p) const {
        return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
    }
    bool contains(const BBox& o) const {
        return o.min_lon >= min_lon && o.max_lon <= max_lon &&
               o.min_lat >= min_lat && o.max_lat <= max_lat;
    }
    BBox expanded(double d) const {
        return {min_lon - d, min_lat - d, max_lon + d, max_lat + d};
    }
    // intersection box; invalid (min > max) when the boxes are disjoint
    BBox intersection(const BBox& o) const {
        return {std::max(min_lon, o.min_lon), std::max(min_lat, o.min_lat),
                std::min(max_lon, o.max_lon), std::min(max_lat, o.max_lat)};
    }
    BBox united(const BBox& o) const {
        return {std::min(min_lon, o.min_lon), std::min(min_lat, o.min_lat),
                std::max(max_lon, o.max_lon), std::max(max_lat, o.max_lat)};
    }

    friend bool operator==(const BBox& a, const BBox& b) {
        return a.min_lon == b.min_lon && a.min_lat == b.min_lat &&
               a.max_lon == b.max_lon && a.max_lat == b.max_lat;
    }
};

inline BBox bbox_of_points(const std::vector<GeoPoint>& pts) {
    BBox b{pts.front().lon, pts.front().lat, pts.front().lon, pts.front().lat};
    for (const auto& p : pts) {
        b.min_lon = std::min(b.min_lon, p.lon);
        b.min_lat = std::min(b.min_lat, p.lat);
        b.max_lon = std::max(b.max_lon, p.lon);
        b.max_lat = std::max(b.max_lat, p.lat);
    }
    return b;
}

/// Ordered point sequence of length >= 2 with no consecutive duplicates.
struct GeoPolyline {
    std::vector<GeoPoint> points;

    static GeoPolyline make(std::vector<GeoPoint> pts) {
        std::vector<GeoPoint> out;
        out.reserve(pts.size());
        for (const auto& p : pts) {
            if (out.empty() || !(out.back() == p)) out.push_back(p);
        }
        if (out.size() < 2) throw InvalidPolygon("polyline needs >= 2 distinct points");
        return GeoPolyline{std::move(out)};
    }
};

using Ring = std::vector<GeoPoint>;

// signed shoelace area; accepts open or explicitly closed rings, CCW positive
inline double signed_ring_area(const Ring& ring) {
    size_t n = ring.size();
    if (n >= 2 && ring.front() == ring.back()) --n;
    if (n < 3) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[(i + 1) % n];
        s += a.lon * b.lat - b.lon * a.lat;
    }
    return 0.5 * s;
}

namespace detail {

inline double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

inline bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

// true when AB and CD cross at an interior point of both, or overlap collinearly
// with positive length; mere endpoint contact is not an intersection here
inline bool segments_conflict(const GeoPoint& a, const GeoPoint& b,
                              const GeoPoint& c, const GeoPoint& d) {
    const double d1 = cross(a, b, c);
    const double d2 = cross(a, b, d);
    const double d3 = cross(c, d, a);
    const double d4 = cross(c, d, b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        // collinear: conflict only when the overlap has positive length
        double lo = std::max(std::min(a.lon, b.lon), std::min(c.lon, d.lon));
        double hi = std::min(std::max(a.lon, b.lon), std::max(c.lon, d.lon));
        double lo2 = std::max(std::min(a.lat, b.lat), std::min(c.lat, d.lat));
        double hi2 = std::min(std::max(a.lat, b.lat), std::max(c.lat, d.lat));
        return (lo < hi) || (lo2 < hi2);
    }
    return false;
}

// rotate ring (no closing duplicate) to its lexicographically smallest rotation
inline void canonical_rotation(Ring& ring) {
    const size_t n = ring.size();
    size_t best = 0;
    for (size_t c = 1; c < n; ++c) {
        for (size_t k = 0; k < n; ++k) {
            const GeoPoint& pc = ring[(c + k) % n];
            const GeoPoint& pb = ring[(best + k) % n];
            if (pc < pb) { best = c; break; }
            if (pb < pc) break;
        }
    }
    std::rotate(ring.begin(), ring.begin() + static_cast<long>(best), ring.end());
}

// strips the closing duplicate and consecutive duplicates (incl. wrap-around)
inline Ring open_dedup(Ring ring) {
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    Ring out;
    out.reserve(ring.size());
    for (const auto& p : ring) {
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    while (out.size() >= 2 && out.front() == out.back()) out.pop_back();
    return out;
}

inline void validate_ring_simple(const Ring& ring) {
    // ring is open here; edges i -> i+1 (mod n). Proper crossings and collinear
    // overlaps between non-adjacent edges are rejected; contact at a shared
    // vertex (pinch point) is tolerated, since traced 8-connected boundaries
    // legitimately touch themselves diagonally.
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue; // adjacent
            const GeoPoint& c = ring[j];
            const GeoPoint& d = ring[(j + 1) % n];
            if (segments_conflict(a, b, c, d))
                throw InvalidPolygon("ring self-intersects");
        }
    }
}

} // namespace detail

/// Closed ring(s); exterior counter-clockwise, holes clockwise. Construct via
/// make(), which normalizes orientation, deduplicates, canonicalizes the
/// starting vertex, and validates simplicity.
struct GeoPolygon {
    Ring exterior;           // closed: first == last
    std::vector<Ring> holes; // each closed

    static GeoPolygon make(Ring ext, std::vector<Ring> holes = {}) {
        GeoPolygon poly;
        poly.exterior = normalize_ring(std::move(ext), /*ccw=*/true);
        for (auto& h : holes) poly.holes.push_back(normalize_ring(std::move(h), /*ccw=*/false));
        return poly;
    }

    // one ring: dedup, orient, canonical start, validate, close
    static Ring normalize_ring(Ring ring, bool ccw) {
        Ring open = detail::open_dedup(std::move(ring));
        if (open.size() < 3) throw InvalidPolygon("ring needs >= 3 distinct points");
        const double area = signed_ring_area(open);
        if (area == 0.0) throw InvalidPolygon("ring has zero area");
        if ((area > 0.0) != ccw) std::reverse(open.begin(), open.end());
        detail::canonical_rotation(open);
        detail::validate_ring_simple(open);
        open.push_back(open.front());
        return open;
    }

    BBox bbox() const { return bbox_of_points(exterior); }
};

/// area of the exterior minus the holes, in squared degrees
inline double polygon_area(const GeoPolygon& poly) {
    double a = std::abs(signed_ring_area(poly.exterior));
    for (const auto& h : poly.holes) a -= std::abs(signed_ring_area(h));
    return std::max(a, 0.0);
}

/// Geo-referenced tile descriptor. Corners must form an axis-aligned
/// rectangle: NW/NE share a latitude, SW/SE share a latitude, NW/SW share a
/// longitude, NE/SE share a longitude, all within 1e-9 degrees.
struct TileMeta {
    std::string id;
    GeoPoint nw, ne, sw, se;
    int width_px = 0;
    int height_px = 0;
    std::string acquired_at; // ISO-8601 UTC, e.g. 2020-05-17T10:30:00Z

    void validate() const {
        constexpr double tol = 1e-9;
        auto fail = [this](const std::string& why) { throw InvalidMeta(id, why); };
        if (id.empty()) fail("empty id");
        if (std::abs(nw.lat - ne.lat) > tol) fail("nw/ne latitudes differ");
        if (std::abs(sw.lat - se.lat) > tol) fail("sw/se latitudes differ");
        if (std::abs(nw.lon - sw.lon) > tol) fail("nw/sw longitudes differ");
        if (std::abs(ne.lon - se.lon) > tol) fail("ne/se longitudes differ");
        if (!(nw.lat > sw.lat)) fail("north edge not above south edge");
        if (!(ne.lon > nw.lon)) fail("east edge not right of west edge");
        if (width_px <= 0 || height_px <= 0) fail("non-positive pixel dimensions");
        for (const GeoPoint& c : {nw, ne, sw, se}) {
            if (c.lon < -180.0 || c.lon > 180.0 || c.lat < -90.0 || c.lat > 90.0)
                fail("corner outside lon/lat range");
        }
        if (!valid_timestamp(acquired_at)) fail("acquired_at not ISO-8601 UTC");
    }

    static bool valid_timestamp(const std::string& ts) {
        // YYYY-MM-DDTHH:MM:SSZ
        if (ts.size() != 20) return false;
        for (size_t i = 0; i < 20; ++i) {
            char c = ts[i];
            switch (i) {
                case 4: case 7: if (c != '-') return false; break;
                case 10: if (c != 'T') return false; break;
                case 13: case 16: if (c != ':') return false; break;
                case 19: if (c != 'Z') return false; break;
                default: if (c < '0' || c > '9') return false;
            }
        }
        return true;
    }
};

inline BBox bbox_of(const TileMeta& m) {
    return {m.sw.lon, m.sw.lat, m.ne.lon, m.ne.lat};
}

/// Affine pixel->geo mapping. Pixel (0,0) is the NW corner; rows grow
/// southward (lat decreases).
struct GeoTransform {
    GeoPoint origin;        // NW corner
    double lon_per_px = 0.0;
    double lat_per_px = 0.0;
};

inline GeoTransform transform_of(const TileMeta& m) {
    return {m.nw,
            (m.ne.lon - m.nw.lon) / m.width_px,
            (m.nw.lat - m.sw.lat) / m.height_px};
}

inline GeoPoint px_to_geo(const GeoTransform& t, double col, double row) {
    return {t.origin.lon + col * t.lon_per_px, t.origin.lat - row * t.lat_per_px};
}

inline std::pair<double, double> geo_to_px(const GeoTransform& t, const GeoPoint& p) {
    return {(p.lon - t.origin.lon) / t.lon_per_px, (t.origin.lat - p.lat) / t.lat_per_px};
}

/// 8-bit grayscale pixel grid plus its georeferencing.
struct RasterTile {
    TileMeta meta;
    std::vector<uint8_t> pixels; // row-major, height_px * width_px

    uint8_t at(int row, int col) const {
        return pixels[static_cast<size_t>(row) * meta.width_px + col];
    }
    uint8_t& at(int row, int col) {
        return pixels[static_cast<size_t>(row) * meta.width_px + col];
    }
    bool dims_match() const {
        return pixels.size() ==
               static_cast<size_t>(meta.width_px) * static_cast<size_t>(meta.height_px);
    }
};

} // namespace tileforge
