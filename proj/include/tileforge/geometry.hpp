#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tileforge/geo.hpp"

namespace tileforge {

inline double point_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    const double vx = b.lon - a.lon, vy = b.lat - a.lat;
    const double wx = p.lon - a.lon, wy = p.lat - a.lat;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.lon - (a.lon + t * vx);
    const double dy = p.lat - (a.lat + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

inline double point_chain_distance(const GeoPoint& p, const std::vector<GeoPoint>& chain) {
    double best = std::numeric_limits<double>::infinity();
    if (chain.size() == 1)
        return std::hypot(p.lon - chain[0].lon, p.lat - chain[0].lat);
    for (size_t i = 0; i + 1 < chain.size(); ++i)
        best = std::min(best, point_segment_distance(p, chain[i], chain[i + 1]));
    return best;
}

/// max over points sampled along a (vertices plus sample_step subdivisions) of
/// the distance to chain b; sample_step <= 0 samples vertices only
inline double directed_hausdorff(const std::vector<GeoPoint>& a,
                                 const std::vector<GeoPoint>& b,
                                 double sample_step = 0.0) {
    double worst = 0.0;
    auto visit = [&](const GeoPoint& p) {
        worst = std::max(worst, point_chain_distance(p, b));
    };
    for (size_t i = 0; i < a.size(); ++i) {
        visit(a[i]);
        if (sample_step > 0.0 && i + 1 < a.size()) {
            const GeoPoint& p = a[i];
            const GeoPoint& q = a[i + 1];
            const double len = std::hypot(q.lon - p.lon, q.lat - p.lat);
            const int steps = static_cast<int>(len / sample_step);
            for (int s = 1; s <= steps; ++s) {
                const double t = s / (steps + 1.0);
                visit({p.lon + t * (q.lon - p.lon), p.lat + t * (q.lat - p.lat)});
            }
        }
    }
    return worst;
}

inline double hausdorff_distance(const std::vector<GeoPoint>& a,
                                 const std::vector<GeoPoint>& b,
                                 double sample_step = 0.0) {
    return std::max(directed_hausdorff(a, b, sample_step),
                    directed_hausdorff(b, a, sample_step));
}

/// even-odd ray cast; accepts open or closed rings
inline bool point_in_ring(const Ring& ring, const GeoPoint& p) {
    size_t n = ring.size();
    if (n >= 2 && ring.front() == ring.back()) --n;
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[j];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

inline bool point_on_ring(const Ring& ring, const GeoPoint& p, double eps) {
    size_t n = ring.size();
    if (n >= 2 && ring.front() == ring.back()) --n;
    for (size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= eps) return true;
    }
    return false;
}

inline bool point_in_polygon(const GeoPolygon& poly, const GeoPoint& p) {
    if (!point_in_ring(poly.exterior, p)) return false;
    for (const auto& h : poly.holes)
        if (point_in_ring(h, p)) return false;
    return true;
}

namespace detail {

// Sutherland-Hodgman: clip `subject` (any orientation, open or closed) against
// the half-plane keep(p) >= 0; `cut` interpolates the boundary crossing.
template <class Keep, class Cut>
inline std::vector<GeoPoint> clip_half_plane(const std::vector<GeoPoint>& subject,
                                             Keep keep, Cut cut) {
    std::vector<GeoPoint> out;
    const size_t n = subject.size();
    if (n == 0) return out;
    out.reserve(n + 4);
    for (size_t i = 0; i < n; ++i) {
        const GeoPoint& cur = subject[i];
        const GeoPoint& nxt = subject[(i + 1) % n];
        const double dc = keep(cur);
        const double dn = keep(nxt);
        if (dc >= 0.0) {
            out.push_back(cur);
            if (dn < 0.0) out.push_back(cut(cur, nxt, dc, dn));
        } else if (dn >= 0.0) {
            out.push_back(cut(cur, nxt, dc, dn));
        }
    }
    return out;
}

inline GeoPoint lerp_cut(const GeoPoint& a, const GeoPoint& b, double da, double db) {
    const double t = da / (da - db);
    return {a.lon + t * (b.lon - a.lon), a.lat + t * (b.lat - a.lat)};
}

} // namespace detail

/// ring clipped to an axis-aligned rectangle (orientation preserved); the
/// result may contain zero-width bridges, which shoelace area ignores
inline Ring clip_ring_to_rect(Ring ring, const BBox& box) {
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    using detail::clip_half_plane;
    using detail::lerp_cut;
    ring = clip_half_plane(ring, [&](const GeoPoint& p) { return p.lon - box.min_lon; }, lerp_cut);
    ring = clip_half_plane(ring, [&](const GeoPoint& p) { return box.max_lon - p.lon; }, lerp_cut);
    ring = clip_half_plane(ring, [&](const GeoPoint& p) { return p.lat - box.min_lat; }, lerp_cut);
    ring = clip_half_plane(ring, [&](const GeoPoint& p) { return box.max_lat - p.lat; }, lerp_cut);
    return ring;
}

/// signed area of ring ∩ rect; sign follows the ring's orientation, so a
/// polygon's CCW exterior contributes positively and CW holes negatively
inline double ring_rect_area_signed(const Ring& ring, const BBox& box) {
    return signed_ring_area(clip_ring_to_rect(ring, box));
}

/// area of polygon interior ∩ rect
inline double polygon_rect_area(const GeoPolygon& poly, const BBox& box) {
    double a = ring_rect_area_signed(poly.exterior, box);
    for (const auto& h : poly.holes) a += ring_rect_area_signed(h, box);
    return std::max(a, 0.0);
}

namespace detail {

// signed area of ring ∩ ccw triangle (o,a,b); ring orientation carries the sign
inline double ring_tri_area_signed(const Ring& ring, const GeoPoint& o,
                                   const GeoPoint& a, const GeoPoint& b) {
    std::vector<GeoPoint> poly(ring.begin(), ring.end());
    if (poly.size() >= 2 && poly.front() == poly.back()) poly.pop_back();
    const GeoPoint tri[3] = {o, a, b};
    for (int e = 0; e < 3 && !poly.empty(); ++e) {
        const GeoPoint& p = tri[e];
        const GeoPoint& q = tri[(e + 1) % 3];
        poly = clip_half_plane(
            poly,
            [&](const GeoPoint& x) {
                return (q.lon - p.lon) * (x.lat - p.lat) - (q.lat - p.lat) * (x.lon - p.lon);
            },
            lerp_cut);
    }
    return signed_ring_area(poly);
}

// ∫ wind_r(x) * wind_s(x) dx over the plane, by fan-decomposing r into signed
// triangles from its first vertex and clipping s against each
inline double rings_overlap_integral(const Ring& r, const Ring& s) {
    size_t n = r.size();
    if (n >= 2 && r.front() == r.back()) --n;
    if (n < 3) return 0.0;
    const GeoPoint& o = r[0];
    double total = 0.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const GeoPoint& a = r[i];
        const GeoPoint& b = r[i + 1];
        const double tri2 = cross(o, a, b);
        if (tri2 == 0.0) continue;
        if (tri2 > 0.0)
            total += ring_tri_area_signed(s, o, a, b);
        else
            total -= ring_tri_area_signed(s, o, b, a);
    }
    return total;
}

} // namespace detail

/// area of P ∩ Q including hole handling, via signed coverage integrals
inline double intersection_area(const GeoPolygon& p, const GeoPolygon& q) {
    if (!p.bbox().intersects(q.bbox())) return 0.0;
    std::vector<const Ring*> pr{&p.exterior};
    for (const auto& h : p.holes) pr.push_back(&h);
    std::vector<const Ring*> qr{&q.exterior};
    for (const auto& h : q.holes) qr.push_back(&h);
    double total = 0.0;
    for (const Ring* r : pr)
        for (const Ring* s : qr) total += detail::rings_overlap_integral(*r, *s);
    return std::max(total, 0.0);
}

inline double iou(const GeoPolygon& p, const GeoPolygon& q) {
    const double inter = intersection_area(p, q);
    const double uni = polygon_area(p) + polygon_area(q) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

} // namespace tileforge
