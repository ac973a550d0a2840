#pragma once

#include <algorithm>
#include <vector>

#include "tileforge/geo.hpp"
#include "tileforge/geometry.hpp"

namespace tileforge {

struct CoverageReport {
    bool covered = true;
    std::vector<BBox> gaps; // uncovered compression-grid cells, interior-disjoint
    double gap_area = 0.0;  // sum of cell ∩ query areas, squared degrees
};

namespace detail {

inline std::vector<double> compress_axis(double lo, double hi,
                                         const std::vector<double>& cuts) {
    std::vector<double> xs{lo, hi};
    for (double c : cuts)
        if (c > lo && c < hi) xs.push_back(c);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

} // namespace detail

/// Is the query polygon fully covered by the footprints? The query bbox is
/// cut into a grid along every footprint edge; each grid cell is then either
/// fully inside some footprint or interior-disjoint from all of them, so the
/// uncovered cells are exactly the cells overlapping the query interior with
/// positive area while lying in no footprint.
inline CoverageReport check_coverage(const GeoPolygon& query,
                                     const std::vector<BBox>& footprints) {
    if (query.exterior.size() < 4) throw InvalidPolygon("query ring not closed");
    const BBox qb = query.bbox();

    std::vector<double> vcuts, hcuts;
    for (const auto& f : footprints) {
        vcuts.push_back(f.min_lon);
        vcuts.push_back(f.max_lon);
        hcuts.push_back(f.min_lat);
        hcuts.push_back(f.max_lat);
    }
    const auto xs = detail::compress_axis(qb.min_lon, qb.max_lon, vcuts);
    const auto ys = detail::compress_axis(qb.min_lat, qb.max_lat, hcuts);

    CoverageReport rep;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        for (size_t j = 0; j + 1 < ys.size(); ++j) {
            const BBox cell{xs[i], ys[j], xs[i + 1], ys[j + 1]};
            if (cell.area() <= 0.0) continue;
            bool covered = false;
            for (const auto& f : footprints) {
                if (f.contains(cell)) {
                    covered = true;
                    break;
                }
            }
            if (covered) continue;
            const double a = polygon_rect_area(query, cell);
            // boundary contact is not a gap; tolerance is relative to the cell
            if (a > cell.area() * 1e-12) {
                rep.gaps.push_back(cell);
                rep.gap_area += a;
            }
        }
    }
    rep.covered = rep.gaps.empty();
    return rep;
}

/// Exact union area of axis-aligned rectangles by coordinate compression.
inline double rect_union_area(const std::vector<BBox>& rects) {
    if (rects.empty()) return 0.0;
    std::vector<double> xs, ys;
    for (const auto& r : rects) {
        xs.push_back(r.min_lon);
        xs.push_back(r.max_lon);
        ys.push_back(r.min_lat);
        ys.push_back(r.max_lat);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    double area = 0.0;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        for (size_t j = 0; j + 1 < ys.size(); ++j) {
            const BBox cell{xs[i], ys[j], xs[i + 1], ys[j + 1]};
            for (const auto& r : rects) {
                if (r.contains(cell)) {
                    area += cell.area();
                    break;
                }
            }
        }
    }
    return area;
}

} // namespace tileforge
